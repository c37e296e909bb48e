#pragma once

#include <array>
#include <optional>

#include "autocore/losses.hpp"
#include "autocore/solvers.hpp"
#include "autocore/types.hpp"

namespace autocore {

// |sum_i f(p_i, x*_I) - sum_i f(p_i, x*_P)|, both solutions evaluated on the
// full data with the same solver config.
double approximation_error(const Dataset& data, const LossFunction& loss, Task task,
                           const Coreset& coreset, const SolverConfig& config);

// Variant with a precomputed full-data solution (the reference solve is
// identical across trials, so experiment sweeps hoist it).
double approximation_error(const Dataset& data, const LossFunction& loss, Task task,
                           const Coreset& coreset, const SolverConfig& config,
                           const Query& full_solution);

struct ClassificationMetrics {
  double accuracy = 0.0;
  // rows = actual (-, +), cols = predicted (-, +): [[TN, FP], [FN, TP]]
  std::array<std::array<long, 2>, 2> confusion{};
};

// Prediction is sign(w.p + b) with zero mapped to +1.
ClassificationMetrics classification_metrics(const Dataset& test, const Query& query);

double r_squared(const Dataset& test, const Query& query);

struct TrainTestSplit {
  Dataset train;
  Dataset test;
};

// Seeded 80/20 shuffle split, stratified for classification.
TrainTestSplit train_test_split(const Dataset& data, double test_fraction,
                                std::uint64_t seed, bool stratify);

double mean_of(const std::vector<double>& values);
double std_of(const std::vector<double>& values);  // population std

}  // namespace autocore
