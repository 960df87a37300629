#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace nlq::cli {

/// Raised by parse_config; the message lists every violated constraint.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
  std::string scenario;      // spin | nlse | epr | linearity | bipartite
  nlohmann::json params;     // validated scenario parameters
};

struct Preset {
  std::string name;
  std::string scenario;
  std::string description;
  nlohmann::json params;
};

const std::vector<Preset>& presets();
const Preset& find_preset(const std::string& name);

/// Validates a raw config document and returns the typed config.
ScenarioConfig parse_config(const nlohmann::json& doc);

struct RunOptions {
  std::string out_dir = ".";
  bool assert_mode = false;
  std::optional<std::uint64_t> seed;  // overrides the config seed
};

struct RunSummary {
  std::string scenario;
  nlohmann::json summary;                   // contents of the summary file
  bool assertions_passed = true;
  int exit_code = 0;                        // 0 ok, 2 assertion failure
  double duration_seconds = 0.0;            // not part of the written files
  std::vector<std::string> artifact_paths;
};

/// Runs the scenario, writes <scenario>_series.csv (when the scenario has a
/// time series) and <scenario>_summary.json under out_dir.
RunSummary run(const ScenarioConfig& config, const RunOptions& opts);

}  // namespace nlq::cli
