#pragma once

#include <cstdint>
#include <vector>

#include "autocore/types.hpp"

namespace autocore {

struct SolverConfig {
  int max_iterations = 1000;
  double tolerance = 1e-10;
  double lambda = 1.0;  // L2 strength on w; the intercept is never penalized
  int k = 1;            // k-means cluster count
  double step_size = 1.0;
  int initial_subset_floor = 256;  // subset size = min(n, max(floor, 10*d))
  std::uint64_t seed = 0;
};

struct SolverResult {
  Query query;
  double objective = 0.0;  // weighted loss + lambda * ||w||^2 at the iterate
  bool converged = true;
  bool jittered = false;  // ridge jitter was needed for a singular system
};

// argmin_x sum_{i in I} v(i) f(p_i, x) + lambda * ||w||^2 for the task's
// built-in loss. Rejects an empty coreset or all-zero weights.
SolverResult solve_weighted(Task task, const Dataset& data, const Coreset& coreset,
                            const SolverConfig& config);

double weighted_objective(Task task, const Dataset& data, const Coreset& coreset,
                          const SolverConfig& config, const Query& query);

// m randomized approximated solutions, each solved on an independent random
// subset (class-stratified for classification). A failed sub-solve falls back
// to a Gaussian random query.
std::vector<Query> initial_solutions(Task task, const Dataset& data, int m,
                                     const SolverConfig& config,
                                     std::uint64_t seed);

}  // namespace autocore
