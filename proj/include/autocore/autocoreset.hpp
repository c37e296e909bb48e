#pragma once

#include <cstdint>
#include <limits>

#include "autocore/loss_matrix.hpp"
#include "autocore/losses.hpp"
#include "autocore/solvers.hpp"
#include "autocore/vsum.hpp"

namespace autocore {

enum class CoresetMode { Optimal, Last };
enum class ErrorMode { Additive, Multiplicative };

struct AutoConfig {
  Eigen::Index tau = 32;
  int m = 10;
  int patience = 7;
  int max_iterations = 200;
  VsumBackend backend = VsumBackend::Caratheodory;
  CoresetMode mode = CoresetMode::Optimal;
  ErrorMode error_mode = ErrorMode::Additive;
  double delta = 0.1;
  std::uint64_t seed = 0;
  SolverConfig solver;
};

struct StoppingState {
  double best_sum = std::numeric_limits<double>::infinity();
  int best_iteration = -1;
  int counter = 0;
  int observed = 0;
};

enum class StopDecision { Continue, Stop };

// Patience rule: a new smallest column sum resets the counter and marks the
// iteration as best; otherwise the counter grows, stopping when it reaches
// patience.
std::pair<StoppingState, StopDecision> stopping_update(const StoppingState& state,
                                                       double new_sum,
                                                       int patience);

struct AutoResult {
  Coreset coreset;
  Query query;
  RunTrace trace;
  LossMatrix matrix;               // final matrix (g-valued in multiplicative mode)
  Eigen::Index built_on_columns = 0;  // prefix width the returned coreset was built on
  std::vector<double> raw_column_sums;  // raw f sums, one per final column
  bool any_solver_failure = false;
};

// Lines 1-7 of the loop: m initial solutions and their loss columns
// (g-transformed when multiplicative). Exposed so the uniform baseline can
// replay the exact initialization of a run from its seed.
LossMatrix initial_loss_matrix(const Dataset& data, const LossFunction& loss,
                               Task task, int m, const SolverConfig& solver,
                               bool multiplicative,
                               std::vector<double>* raw_sums = nullptr);

AutoResult autocoreset(const Dataset& data, const LossFunction& loss, Task task,
                       const AutoConfig& config);

struct WitnessReport {
  int checked = 0;
  int failed = 0;
  double max_violation = 0.0;  // max over draws of |sum - weighted sum|^2 - bound
  bool ok() const { return failed == 0; }
};

// Checks |sum_i l_i - sum_j v(j) l_j|^2 <= vsum_error + 1e-9 for the synthetic
// column l = M alpha, then for `trials` random simplex draws.
WitnessReport convex_witness_check(const LossMatrix& matrix, const Coreset& coreset,
                                   const ConvexWeights& alpha, int trials,
                                   std::uint64_t seed = 13);

}  // namespace autocore
