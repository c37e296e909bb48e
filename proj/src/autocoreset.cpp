#include "autocore/autocoreset.hpp"

#include <chrono>
#include <cmath>

#include "autocore/rng.hpp"

namespace autocore {

std::pair<StoppingState, StopDecision> stopping_update(const StoppingState& state,
                                                       double new_sum,
                                                       int patience) {
  if (!(new_sum >= 0.0) || !std::isfinite(new_sum))
    throw std::invalid_argument("column sum must be finite and >= 0");
  StoppingState next = state;
  if (new_sum < next.best_sum) {
    next.best_sum = new_sum;
    next.best_iteration = next.observed;
    next.counter = 0;
  } else {
    ++next.counter;
  }
  ++next.observed;
  return {next, next.counter >= patience ? StopDecision::Stop : StopDecision::Continue};
}

namespace {

void validate_config(const AutoConfig& config) {
  if (config.tau < 1) throw std::invalid_argument("tau must be >= 1");
  if (config.m < 1) throw std::invalid_argument("m must be >= 1");
  if (config.patience < 1) throw std::invalid_argument("patience must be >= 1");
  if (config.max_iterations < 1)
    throw std::invalid_argument("max_iterations must be >= 1");
}

VsumRequest request_for(const AutoConfig& config, Eigen::Index n, int iteration) {
  VsumRequest req;
  req.target_size = std::min<Eigen::Index>(config.tau, n);
  req.delta = config.delta;
  req.backend = config.backend;
  req.seed = derive_seed(config.seed, "vsum-iteration",
                         static_cast<std::uint64_t>(iteration));
  return req;
}

}  // namespace

LossMatrix initial_loss_matrix(const Dataset& data, const LossFunction& loss,
                               Task task, int m, const SolverConfig& solver,
                               bool multiplicative,
                               std::vector<double>* raw_sums) {
  std::vector<Query> initial = initial_solutions(task, data, m, solver, solver.seed);
  RowMatrix entries(data.n(), m);
  for (int j = 0; j < m; ++j) {
    Eigen::VectorXd column =
        eval_loss_column(loss, data, initial[static_cast<std::size_t>(j)]);
    if (raw_sums) raw_sums->push_back(column.sum());
    entries.col(j) = multiplicative ? multiplicative_transform(column) : column;
  }
  return make_loss_matrix(std::move(entries), std::move(initial));
}

AutoResult autocoreset(const Dataset& data, const LossFunction& loss, Task task,
                       const AutoConfig& config) {
  validate_config(config);
  require_valid_for_task(data, task);
  if (loss.kind != task)
    throw std::invalid_argument("loss kind does not match the task");

  const bool multiplicative = config.error_mode == ErrorMode::Multiplicative;

  SolverConfig solver = config.solver;
  solver.seed = derive_seed(config.seed, "solver-init");

  std::vector<double> raw_sums;
  raw_sums.reserve(static_cast<std::size_t>(config.m));
  LossMatrix matrix =
      initial_loss_matrix(data, loss, task, config.m, solver, multiplicative, &raw_sums);

  AutoResult result;
  StoppingState stop_state;
  Coreset last_coreset;
  Query last_query;
  bool have_query = false;

  int iterations = 0;
  for (; iterations < config.max_iterations; ++iterations) {
    const auto iter_start = std::chrono::steady_clock::now();

    last_coreset = build_vsum_coreset(matrix, request_for(config, data.n(), iterations));

    SolverConfig iter_solver = config.solver;
    iter_solver.seed = derive_seed(config.seed, "solver-iteration",
                                   static_cast<std::uint64_t>(iterations));
    bool solver_ok = true;
    try {
      SolverResult solved = solve_weighted(task, data, last_coreset, iter_solver);
      last_query = std::move(solved.query);
      have_query = true;
      solver_ok = solved.converged;
    } catch (const std::exception&) {
      solver_ok = false;
      result.any_solver_failure = true;
      if (!have_query) {
        // no previous solution to reuse: fall back to the first initial one
        last_query = matrix.queries.front();
        have_query = true;
      }
    }

    Eigen::VectorXd column = eval_loss_column(loss, data, last_query);
    const double raw_sum = column.sum();
    raw_sums.push_back(raw_sum);

    auto [next_state, decision] = stopping_update(stop_state, raw_sum, config.patience);
    stop_state = next_state;

    matrix = append_column(
        matrix, multiplicative ? multiplicative_transform(column).eval() : column,
        last_query);

    IterationRecord record;
    record.column_sum = raw_sum;
    record.vsum_error = last_coreset.vsum_error;
    record.coreset_size = static_cast<int>(last_coreset.size());
    record.patience_counter = stop_state.counter;
    record.solver_converged = solver_ok;
    record.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - iter_start)
            .count();
    result.trace.records.push_back(record);

    if (decision == StopDecision::Stop) {
      ++iterations;
      break;
    }
  }
  result.trace.best_iteration = stop_state.best_iteration;

  if (config.mode == CoresetMode::Optimal && stop_state.best_iteration >= 0) {
    // Replay the vsum build on the matrix prefix the best iteration saw; the
    // derived seed makes it identical to the coreset produced back then.
    const int best = stop_state.best_iteration;
    const Eigen::Index width = static_cast<Eigen::Index>(config.m) + best;
    LossMatrix prefix = matrix_prefix(matrix, width);
    result.coreset = build_vsum_coreset(prefix, request_for(config, data.n(), best));
    result.built_on_columns = width;
  } else {
    result.coreset = last_coreset;
    result.built_on_columns =
        static_cast<Eigen::Index>(config.m) + (iterations - 1);
  }

  SolverConfig final_solver = config.solver;
  final_solver.seed = derive_seed(config.seed, "solver-final");
  result.query = solve_weighted(task, data, result.coreset, final_solver).query;
  result.matrix = std::move(matrix);
  result.raw_column_sums = std::move(raw_sums);
  return result;
}

WitnessReport convex_witness_check(const LossMatrix& matrix, const Coreset& coreset,
                                   const ConvexWeights& alpha, int trials,
                                   std::uint64_t seed) {
  if (static_cast<Eigen::Index>(alpha.alpha.size()) != matrix.cols())
    throw std::invalid_argument("alpha length must equal the column count");
  make_convex_weights(alpha.alpha);  // simplex membership check
  require_valid_coreset(coreset, matrix.rows());

  const double bound = coreset.vsum_error + 1e-9;

  auto check_one = [&](const Eigen::VectorXd& weights) {
    const Eigen::VectorXd synthetic = matrix.entries * weights;
    double full = synthetic.sum();
    double approx = 0.0;
    for (std::size_t j = 0; j < coreset.indices.size(); ++j)
      approx += coreset.weights[j] * synthetic(coreset.indices[j]);
    const double err = (full - approx) * (full - approx);
    return err - bound;
  };

  WitnessReport report;
  Eigen::VectorXd first =
      Eigen::Map<const Eigen::VectorXd>(alpha.alpha.data(),
                                        static_cast<Eigen::Index>(alpha.alpha.size()));
  double violation = check_one(first);
  report.checked = 1;
  if (violation > 0.0) ++report.failed;
  report.max_violation = violation;

  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    const std::vector<double> draw =
        sample_simplex(static_cast<std::size_t>(matrix.cols()), rng);
    Eigen::VectorXd weights = Eigen::Map<const Eigen::VectorXd>(
        draw.data(), static_cast<Eigen::Index>(draw.size()));
    violation = check_one(weights);
    ++report.checked;
    if (violation > 0.0) ++report.failed;
    report.max_violation = std::max(report.max_violation, violation);
  }
  return report;
}

}  // namespace autocore
