#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "autocore/autocoreset.hpp"
#include "autocore/synthetic.hpp"

namespace autocore {

struct ExperimentConfig {
  // Data source: one of csv_path (+ label_column) or synthetic.
  std::string csv_path;
  std::string label_column;
  std::optional<SyntheticSpec> synthetic;

  Task task = Task::LogisticRegression;
  std::vector<VsumBackend> backends{VsumBackend::Caratheodory};
  std::vector<Eigen::Index> sizes{32};
  int trials = 16;
  AutoConfig auto_config;  // tau is taken from `sizes` per sweep point
  std::uint64_t master_seed = 0;
  std::string output_dir = "reports";
  std::string run_name = "experiment";
  int threads = 0;  // 0 = hardware concurrency
  bool standardize = false;
  double test_fraction = 0.2;
};

std::uint64_t trial_seed(std::uint64_t master_seed, const std::string& backend,
                         Eigen::Index tau, int trial);

struct ExperimentOutcome {
  nlohmann::json report;
  std::string json_path;
  std::string csv_path;
  int failed_trials = 0;
  int total_trials = 0;
};

// Runs every (backend, tau, trial) plus the uniform baseline, writes the JSON
// report and the plot-ready CSV, and returns both. Deterministic given the
// master seed; wall-clock values are confined to the report's "timing" field.
ExperimentOutcome run_experiment(const ExperimentConfig& config);

nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);

}  // namespace autocore
