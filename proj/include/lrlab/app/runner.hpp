#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lrlab/app/config.hpp"
#include "lrlab/app/report.hpp"
#include "lrlab/error.hpp"

namespace lrlab::app {

std::string version();

struct RunOptions {
  std::filesystem::path out_dir = "lrlab-out";
  std::string config_path;
  int threads = 0;  ///< 0 keeps the OpenMP default
  bool deterministic = false;
  std::string only_type;          ///< run only scenarios of this type when non-empty
  nlohmann::json param_overrides;  ///< merged into every selected scenario's params
  bool quiet = false;
};

struct RunOutcome {
  int exit_code = 0;
  std::vector<ScenarioReport> reports;
};

/// Exit code for an error category: 2 for configuration problems, 3 for failed assertions, 4 otherwise.
int exit_code_for(ErrorCode code);

/// Parses every scenario, builds its grids and samples its fields; throws ConfigInvalid naming the field.
void validate(const ExperimentConfig& config);

ScenarioReport run_scenario(const ExperimentConfig& config, const ScenarioSpec& spec);

/// Validates, runs the selected scenarios in order and writes `manifest.json` and `<name>/report.json`.
RunOutcome run(const ExperimentConfig& config, const RunOptions& options);

}  // namespace lrlab::app
