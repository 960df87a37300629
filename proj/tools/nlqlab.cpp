#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "nlq/cli.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string preset_name;
  std::string out_dir = ".";
  bool assert_mode = false;
  std::optional<std::uint64_t> seed;
  bool list_presets = false;
};

void add_common_flags(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON config file");
  cmd->add_option("--preset", args.preset_name, "named built-in preset");
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_flag("--assert", args.assert_mode,
                "evaluate the config's assertions; exit 2 on failure");
  cmd->add_option("--seed", args.seed, "RNG seed (overrides the config)");
  cmd->add_flag("--list-presets", args.list_presets,
                "list presets for this scenario");
}

void print_presets(const std::string& scenario_filter) {
  for (const auto& p : nlq::cli::presets()) {
    if (!scenario_filter.empty() && p.scenario != scenario_filter) continue;
    std::cout << p.name << "  [" << p.scenario << "]  " << p.description
              << '\n';
  }
}

int run_scenario(const std::string& scenario, const CommonArgs& args) {
  if (args.list_presets) {
    print_presets(scenario);
    return 0;
  }

  nlohmann::json doc;
  if (!args.preset_name.empty()) {
    const nlq::cli::Preset& preset = nlq::cli::find_preset(args.preset_name);
    if (preset.scenario != scenario) {
      std::cerr << "error: preset \"" << preset.name << "\" belongs to the "
                << preset.scenario << " scenario\n";
      return 1;
    }
    doc = preset.params;
    doc["scenario"] = preset.scenario;
  } else if (!args.config_path.empty()) {
    std::ifstream in(args.config_path);
    if (!in) {
      std::cerr << "error: cannot open config " << args.config_path << '\n';
      return 1;
    }
    try {
      in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
      std::cerr << "error: malformed JSON: " << e.what() << '\n';
      return 1;
    }
    if (!doc.contains("scenario")) doc["scenario"] = scenario;
  } else {
    std::cerr << "error: provide --config or --preset\n";
    return 1;
  }

  nlq::cli::ScenarioConfig config;
  try {
    config = nlq::cli::parse_config(doc);
  } catch (const nlq::cli::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  if (config.scenario != scenario) {
    std::cerr << "error: config names scenario \"" << config.scenario
              << "\" but the " << scenario << " subcommand was invoked\n";
    return 1;
  }

  nlq::cli::RunOptions opts;
  opts.out_dir = args.out_dir;
  opts.assert_mode = args.assert_mode;
  opts.seed = args.seed;

  try {
    nlq::cli::RunSummary result = nlq::cli::run(config, opts);
    for (const auto& path : result.artifact_paths) {
      std::cout << "wrote " << path << '\n';
    }
    std::cout << "duration_seconds " << result.duration_seconds << '\n';
    if (args.assert_mode) {
      std::cout << (result.assertions_passed ? "assertions: PASS"
                                             : "assertions: FAIL")
                << '\n';
    }
    return result.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error [" << scenario << "]: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nlqlab: nonlinear quantum dynamics laboratory"};
  app.require_subcommand(0, 1);

  bool list_all = false;
  app.add_flag("--list-presets", list_all, "list every built-in preset");

  const std::string scenarios[] = {"spin", "nlse", "epr", "linearity",
                                   "bipartite"};
  CommonArgs args[5];
  CLI::App* cmds[5];
  for (int i = 0; i < 5; ++i) {
    cmds[i] = app.add_subcommand(scenarios[i]);
    add_common_flags(cmds[i], args[i]);
  }

  CLI11_PARSE(app, argc, argv);

  if (list_all) {
    print_presets("");
    return 0;
  }
  for (int i = 0; i < 5; ++i) {
    if (cmds[i]->parsed()) return run_scenario(scenarios[i], args[i]);
  }
  std::cout << app.help();
  return 1;
}
