#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "nlq/cli.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

fs::path fresh_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("nlqlab_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("parse_config accepts a minimal spin config") {
  json doc = {{"scenario", "spin"},
              {"eps", 1.0},
              {"s0", {0.7071, 0.0, 0.7071}},
              {"t_final", 5.0}};
  nlq::cli::ScenarioConfig cfg = nlq::cli::parse_config(doc);
  CHECK(cfg.scenario == "spin");
  CHECK(cfg.params["eps"] == 1.0);
}

TEST_CASE("parse_config reports every violated constraint by name") {
  SUBCASE("missing eps") {
    json doc = {{"scenario", "spin"}, {"s0", {0, 0, 1}}, {"t_final", 1.0}};
    try {
      nlq::cli::parse_config(doc);
      FAIL("expected ConfigError");
    } catch (const nlq::cli::ConfigError& e) {
      CHECK(std::string(e.what()).find("eps") != std::string::npos);
    }
  }
  SUBCASE("several violations are all listed") {
    json doc = {{"scenario", "nlse"}, {"b", -1.0}, {"n_points", 100}};
    try {
      nlq::cli::parse_config(doc);
      FAIL("expected ConfigError");
    } catch (const nlq::cli::ConfigError& e) {
      std::string msg = e.what();
      CHECK(msg.find("\"b\"") != std::string::npos);
      CHECK(msg.find("t_final") != std::string::npos);
      CHECK(msg.find("n_points") != std::string::npos);
    }
  }
  SUBCASE("out-of-range map parameter") {
    json doc = {{"scenario", "linearity"},
                {"map", {{"type", "kraus"},
                         {"channel", "depolarizing"},
                         {"q", 1.5}}}};
    CHECK_THROWS_AS(nlq::cli::parse_config(doc), nlq::cli::ConfigError);
  }
  SUBCASE("unknown scenario") {
    json doc = {{"scenario", "frobnicate"}};
    CHECK_THROWS_AS(nlq::cli::parse_config(doc), nlq::cli::ConfigError);
  }
}

TEST_CASE("every preset parses and passes its own assert run") {
  for (const nlq::cli::Preset& preset : nlq::cli::presets()) {
    CAPTURE(preset.name);
    json doc = preset.params;
    doc["scenario"] = preset.scenario;
    nlq::cli::ScenarioConfig cfg = nlq::cli::parse_config(doc);

    nlq::cli::RunOptions opts;
    opts.out_dir = fresh_dir("preset_" + preset.name).string();
    opts.assert_mode = true;
    nlq::cli::RunSummary result = nlq::cli::run(cfg, opts);
    CHECK(result.assertions_passed);
    CHECK(result.exit_code == 0);
  }
}

TEST_CASE("runs are byte-identical for a fixed seed") {
  for (const std::string name : {"weinberg-witness", "bipartite-consistency",
                                 "spin-oracle"}) {
    const nlq::cli::Preset& preset = nlq::cli::find_preset(name);
    json doc = preset.params;
    doc["scenario"] = preset.scenario;
    nlq::cli::ScenarioConfig cfg = nlq::cli::parse_config(doc);

    nlq::cli::RunOptions a;
    a.out_dir = fresh_dir("rerun_a_" + name).string();
    nlq::cli::RunOptions b;
    b.out_dir = fresh_dir("rerun_b_" + name).string();
    nlq::cli::RunSummary ra = nlq::cli::run(cfg, a);
    nlq::cli::RunSummary rb = nlq::cli::run(cfg, b);
    REQUIRE(ra.artifact_paths.size() == rb.artifact_paths.size());
    for (std::size_t i = 0; i < ra.artifact_paths.size(); ++i) {
      CHECK(slurp(ra.artifact_paths[i]) == slurp(rb.artifact_paths[i]));
    }
  }
}

TEST_CASE("CSV headers match the documented schema") {
  struct Case {
    const char* preset;
    const char* header;
  };
  for (const Case& c : {Case{"spin-oracle", "t,s1,s2,s3"},
                        Case{"gausson-hold", "t,norm,width,energy"},
                        Case{"conditional-sweep",
                             "t,ensemble_mean_sigma2,branch_plus,branch_minus"},
                        Case{"signaling-peak", "t,statistic"}}) {
    const nlq::cli::Preset& preset = nlq::cli::find_preset(c.preset);
    json doc = preset.params;
    doc["scenario"] = preset.scenario;
    nlq::cli::RunOptions opts;
    opts.out_dir = fresh_dir(std::string("csv_") + c.preset).string();
    nlq::cli::RunSummary r = nlq::cli::run(nlq::cli::parse_config(doc), opts);
    REQUIRE(r.artifact_paths.size() == 2);
    std::string csv = slurp(r.artifact_paths[0]);
    CHECK(csv.substr(0, csv.find('\n')) == c.header);
  }
}

TEST_CASE("seed option overrides the config seed") {
  json doc = {{"scenario", "linearity"},
              {"map", {{"type", "weinberg"}, {"eps", 1.0}}},
              {"samples", 10},
              {"seed", 1}};
  nlq::cli::ScenarioConfig cfg = nlq::cli::parse_config(doc);

  nlq::cli::RunOptions with_override;
  with_override.out_dir = fresh_dir("seed_a").string();
  with_override.seed = 2;
  nlq::cli::RunOptions from_config;
  from_config.out_dir = fresh_dir("seed_b").string();

  nlq::cli::RunSummary a = nlq::cli::run(cfg, with_override);
  nlq::cli::RunSummary b = nlq::cli::run(cfg, from_config);
  CHECK(a.summary["metrics"]["seed"] == 2);
  CHECK(b.summary["metrics"]["seed"] == 1);
  CHECK(a.summary["metrics"]["mixture_residual"] !=
        b.summary["metrics"]["mixture_residual"]);
}

TEST_CASE("failed assertions exit with code 2") {
  json doc = {{"scenario", "epr"},
              {"eps", 1.0},
              {"t_final", 2.0},
              {"setting", "45"},
              {"assert", {{"max_sweep_error", {{"le", 0.0}}}}}};
  // max_sweep_error is tiny but nonzero, so a bound of exactly 0 must fail.
  nlq::cli::ScenarioConfig cfg = nlq::cli::parse_config(doc);
  nlq::cli::RunOptions opts;
  opts.out_dir = fresh_dir("assert_fail").string();
  opts.assert_mode = true;
  nlq::cli::RunSummary r = nlq::cli::run(cfg, opts);
  CHECK_FALSE(r.assertions_passed);
  CHECK(r.exit_code == 2);
}

TEST_CASE("bounds-doc preset carries the documented limits") {
  const nlq::cli::Preset& preset = nlq::cli::find_preset("bounds-doc");
  json doc = preset.params;
  doc["scenario"] = preset.scenario;
  nlq::cli::RunOptions opts;
  opts.out_dir = fresh_dir("bounds").string();
  nlq::cli::RunSummary r = nlq::cli::run(nlq::cli::parse_config(doc), opts);
  CHECK(r.summary["metrics"]["b_fresnel_limit_ev"] == 3.3e-15);
  CHECK(r.summary["metrics"]["b_two_slit_limit_ev"] == 3.4e-13);
  CHECK(r.summary["metrics"]["epsilon_limit_ev"] == 1.6e-20);
}
