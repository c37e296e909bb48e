#include "autocore/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "autocore/csv.hpp"
#include "autocore/metrics.hpp"
#include "autocore/report_schema.hpp"
#include "autocore/rng.hpp"

namespace autocore {

std::uint64_t trial_seed(std::uint64_t master_seed, const std::string& backend,
                         Eigen::Index tau, int trial) {
  return derive_seed(master_seed, backend, static_cast<std::uint64_t>(tau),
                     static_cast<std::uint64_t>(trial));
}

namespace {

Dataset load_experiment_data(const ExperimentConfig& config) {
  Dataset data = config.synthetic
                     ? generate_synthetic(*config.synthetic,
                                          derive_seed(config.master_seed, "data"))
                     : load_csv(config.csv_path, config.label_column, config.task);
  if (config.standardize) {
    Eigen::RowVectorXd mean = data.points.colwise().mean();
    Eigen::RowVectorXd std_dev =
        ((data.points.rowwise() - mean).array().square().colwise().sum() /
         static_cast<double>(data.n()))
            .sqrt();
    for (Eigen::Index j = 0; j < data.dim(); ++j)
      if (std_dev(j) <= 0.0) std_dev(j) = 1.0;
    data.points = (data.points.rowwise() - mean).array().rowwise() / std_dev.array();
  }
  return data;
}

// Uniform baseline for classification keeps every class represented: the
// minority class receives a slightly larger-than-proportional quota.
Coreset stratified_uniform(const Dataset& data, Eigen::Index tau, std::uint64_t seed) {
  std::vector<Index> neg, pos;
  for (Eigen::Index i = 0; i < data.n(); ++i)
    (data.label(i) < 0 ? neg : pos).push_back(i);

  const bool neg_minority = neg.size() <= pos.size();
  auto& minority = neg_minority ? neg : pos;
  auto& majority = neg_minority ? pos : neg;

  const double share =
      static_cast<double>(minority.size()) / static_cast<double>(data.n());
  Eigen::Index quota_min = std::min<Eigen::Index>(
      static_cast<Eigen::Index>(minority.size()),
      static_cast<Eigen::Index>(share * static_cast<double>(tau)) + 1);
  if (minority.empty()) quota_min = 0;
  Eigen::Index quota_maj =
      std::min<Eigen::Index>(tau - quota_min, static_cast<Eigen::Index>(majority.size()));

  Rng rng(derive_seed(seed, "stratified-uniform"));
  Coreset cs;
  auto draw = [&](std::vector<Index>& from, Eigen::Index count) {
    for (Eigen::Index k = 0; k < count; ++k) {
      std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(k),
                                                      from.size() - 1);
      std::swap(from[static_cast<std::size_t>(k)], from[pick(rng)]);
      cs.indices.push_back(from[static_cast<std::size_t>(k)]);
    }
  };
  draw(minority, quota_min);
  draw(majority, quota_maj);
  std::sort(cs.indices.begin(), cs.indices.end());
  cs.weights.assign(cs.indices.size(),
                    static_cast<double>(data.n()) / static_cast<double>(tau));
  cs.source = "uniform-baseline";
  return cs;
}

nlohmann::json trace_to_json(const RunTrace& trace) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : trace.records) {
    records.push_back({{"column_sum", r.column_sum},
                       {"vsum_error", r.vsum_error},
                       {"coreset_size", r.coreset_size},
                       {"patience_counter", r.patience_counter},
                       {"solver_converged", r.solver_converged}});
  }
  return {{"best_iteration", trace.best_iteration}, {"records", std::move(records)}};
}

struct TrialContext {
  const ExperimentConfig* config = nullptr;
  const Dataset* train = nullptr;
  const Dataset* test = nullptr;
  const LossFunction* loss = nullptr;
  Query full_solution;
  double full_total = 0.0;
};

nlohmann::json score_query(const TrialContext& ctx, const Query& query) {
  nlohmann::json metrics;
  const double total = eval_loss_column(*ctx.loss, *ctx.train, query).sum();
  metrics["approx_error"] = std::abs(total - ctx.full_total);
  metrics["train_loss"] = total;
  if (task_is_classification(ctx.config->task)) {
    const ClassificationMetrics cm = classification_metrics(*ctx.test, query);
    metrics["accuracy"] = cm.accuracy;
    metrics["confusion"] = {{cm.confusion[0][0], cm.confusion[0][1]},
                            {cm.confusion[1][0], cm.confusion[1][1]}};
  } else if (ctx.config->task == Task::LinearRegression) {
    metrics["r2"] = r_squared(*ctx.test, query);
  }
  return metrics;
}

struct TrialOutput {
  nlohmann::json primary;
  nlohmann::json baseline;  // null unless this task also carries the baseline
  bool failed = false;
};

TrialOutput run_trial(const TrialContext& ctx, VsumBackend backend,
                      Eigen::Index tau, int trial, bool with_baseline) {
  const ExperimentConfig& config = *ctx.config;
  const std::string backend_label = backend_name(backend);
  const std::uint64_t seed =
      trial_seed(config.master_seed, backend_label, tau, trial);

  TrialOutput out;
  out.primary = {{"backend", backend_label},
                 {"tau", static_cast<std::int64_t>(tau)},
                 {"trial", trial},
                 {"seed", seed}};
  AutoConfig auto_config = config.auto_config;
  auto_config.tau = tau;
  auto_config.backend = backend;
  auto_config.seed = seed;

  try {
    AutoResult result = autocoreset(*ctx.train, *ctx.loss, config.task, auto_config);
    nlohmann::json metrics = score_query(ctx, result.query);
    metrics["coreset_size"] = static_cast<std::int64_t>(result.coreset.size());
    metrics["vsum_error"] = result.coreset.vsum_error;
    metrics["iterations"] = static_cast<std::int64_t>(result.trace.records.size());
    out.primary["metrics"] = std::move(metrics);
    out.primary["trace"] = trace_to_json(result.trace);
    out.primary["status"] = "ok";
  } catch (const std::exception& e) {
    out.primary["status"] = "failed";
    out.primary["error"] = e.what();
    out.failed = true;
  }

  if (!with_baseline) return out;

  const std::uint64_t baseline_seed =
      trial_seed(config.master_seed, "uniform-baseline", tau, trial);
  out.baseline = {{"backend", "uniform-baseline"},
                  {"tau", static_cast<std::int64_t>(tau)},
                  {"trial", trial},
                  {"seed", baseline_seed},
                  {"paired_backend", backend_label}};
  try {
    // Same m initial solutions as the paired run (replayed from its seed),
    // then a single uniform draw instead of the iterative loop.
    SolverConfig init_solver = config.auto_config.solver;
    init_solver.seed = derive_seed(seed, "solver-init");
    LossMatrix initial = initial_loss_matrix(
        *ctx.train, *ctx.loss, config.task, config.auto_config.m, init_solver,
        config.auto_config.error_mode == ErrorMode::Multiplicative);

    const Eigen::Index effective_tau = std::min<Eigen::Index>(tau, ctx.train->n());
    Coreset coreset =
        task_is_classification(config.task)
            ? stratified_uniform(*ctx.train, effective_tau, baseline_seed)
            : uniform_sampling(initial, effective_tau, baseline_seed);
    coreset.vsum_error = vsum_error(initial, coreset);

    SolverConfig solve_config = config.auto_config.solver;
    solve_config.seed = derive_seed(baseline_seed, "solve");
    const Query query =
        solve_weighted(config.task, *ctx.train, coreset, solve_config).query;

    nlohmann::json metrics = score_query(ctx, query);
    metrics["coreset_size"] = static_cast<std::int64_t>(coreset.size());
    metrics["vsum_error"] = coreset.vsum_error;
    out.baseline["metrics"] = std::move(metrics);
    out.baseline["status"] = "ok";
  } catch (const std::exception& e) {
    out.baseline["status"] = "failed";
    out.baseline["error"] = e.what();
    out.failed = true;
  }
  return out;
}

std::string iso_timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

}  // namespace

nlohmann::json config_to_json(const ExperimentConfig& config) {
  nlohmann::json j;
  j["task"] = task_name(config.task);
  nlohmann::json backends = nlohmann::json::array();
  for (VsumBackend b : config.backends) backends.push_back(backend_name(b));
  j["backends"] = std::move(backends);
  nlohmann::json sizes = nlohmann::json::array();
  for (Eigen::Index tau : config.sizes) sizes.push_back(static_cast<std::int64_t>(tau));
  j["sizes"] = std::move(sizes);
  j["trials"] = config.trials;
  j["m"] = config.auto_config.m;
  j["patience"] = config.auto_config.patience;
  j["mode"] = config.auto_config.mode == CoresetMode::Optimal ? "optimal" : "last";
  j["error_mode"] =
      config.auto_config.error_mode == ErrorMode::Additive ? "additive" : "multiplicative";
  j["max_iterations"] = config.auto_config.max_iterations;
  j["master_seed"] = config.master_seed;
  j["standardize"] = config.standardize;
  j["test_fraction"] = config.test_fraction;
  j["run_name"] = config.run_name;
  j["solver"] = {{"lambda", config.auto_config.solver.lambda},
                 {"max_iterations", config.auto_config.solver.max_iterations},
                 {"tolerance", config.auto_config.solver.tolerance},
                 {"k", config.auto_config.solver.k},
                 {"step_size", config.auto_config.solver.step_size},
                 {"initial_subset_floor", config.auto_config.solver.initial_subset_floor}};
  if (config.synthetic) {
    j["synthetic"] = {{"generator", config.synthetic->generator},
                      {"n", static_cast<std::int64_t>(config.synthetic->n)},
                      {"d", static_cast<std::int64_t>(config.synthetic->d)},
                      {"noise", config.synthetic->noise},
                      {"k", config.synthetic->k},
                      {"balance", config.synthetic->balance},
                      {"separation", config.synthetic->separation}};
  } else {
    j["csv_path"] = config.csv_path;
    j["label_column"] = config.label_column;
  }
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig config;
  if (j.contains("task")) config.task = task_from_name(j["task"].get<std::string>());
  if (j.contains("backends")) {
    config.backends.clear();
    for (const auto& b : j["backends"])
      config.backends.push_back(backend_from_name(b.get<std::string>()));
  }
  if (j.contains("sizes")) {
    config.sizes.clear();
    for (const auto& s : j["sizes"]) config.sizes.push_back(s.get<std::int64_t>());
  }
  if (j.contains("trials")) config.trials = j["trials"].get<int>();
  if (j.contains("m")) config.auto_config.m = j["m"].get<int>();
  if (j.contains("patience")) config.auto_config.patience = j["patience"].get<int>();
  if (j.contains("mode"))
    config.auto_config.mode =
        j["mode"].get<std::string>() == "last" ? CoresetMode::Last : CoresetMode::Optimal;
  if (j.contains("error_mode"))
    config.auto_config.error_mode = j["error_mode"].get<std::string>() == "multiplicative"
                                        ? ErrorMode::Multiplicative
                                        : ErrorMode::Additive;
  if (j.contains("max_iterations"))
    config.auto_config.max_iterations = j["max_iterations"].get<int>();
  if (j.contains("master_seed"))
    config.master_seed = j["master_seed"].get<std::uint64_t>();
  if (j.contains("standardize")) config.standardize = j["standardize"].get<bool>();
  if (j.contains("test_fraction"))
    config.test_fraction = j["test_fraction"].get<double>();
  if (j.contains("run_name")) config.run_name = j["run_name"].get<std::string>();
  if (j.contains("solver")) {
    const auto& s = j["solver"];
    if (s.contains("lambda")) config.auto_config.solver.lambda = s["lambda"].get<double>();
    if (s.contains("max_iterations"))
      config.auto_config.solver.max_iterations = s["max_iterations"].get<int>();
    if (s.contains("tolerance"))
      config.auto_config.solver.tolerance = s["tolerance"].get<double>();
    if (s.contains("k")) config.auto_config.solver.k = s["k"].get<int>();
    if (s.contains("step_size"))
      config.auto_config.solver.step_size = s["step_size"].get<double>();
    if (s.contains("initial_subset_floor"))
      config.auto_config.solver.initial_subset_floor =
          s["initial_subset_floor"].get<int>();
  }
  if (j.contains("synthetic")) {
    SyntheticSpec spec;
    const auto& s = j["synthetic"];
    spec.generator = s["generator"].get<std::string>();
    if (s.contains("n")) spec.n = s["n"].get<std::int64_t>();
    if (s.contains("d")) spec.d = s["d"].get<std::int64_t>();
    if (s.contains("noise")) spec.noise = s["noise"].get<double>();
    if (s.contains("k")) spec.k = s["k"].get<int>();
    if (s.contains("balance")) spec.balance = s["balance"].get<double>();
    if (s.contains("separation")) spec.separation = s["separation"].get<double>();
    config.synthetic = spec;
  }
  if (j.contains("csv_path")) config.csv_path = j["csv_path"].get<std::string>();
  if (j.contains("label_column"))
    config.label_column = j["label_column"].get<std::string>();
  return config;
}

ExperimentOutcome run_experiment(const ExperimentConfig& config) {
  if (config.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (config.sizes.empty()) throw std::invalid_argument("size sweep must be nonempty");
  if (config.backends.empty()) throw std::invalid_argument("backend list must be nonempty");

  const auto start = std::chrono::steady_clock::now();

  const Dataset data = load_experiment_data(config);
  for (Eigen::Index tau : config.sizes)
    if (tau < 1 || tau > data.n())
      throw std::invalid_argument("coreset size " + std::to_string(tau) +
                                  " out of range for n = " + std::to_string(data.n()));

  const bool needs_split =
      task_is_classification(config.task) || config.task == Task::LinearRegression;
  TrainTestSplit split;
  if (needs_split) {
    split = train_test_split(data, config.test_fraction,
                             derive_seed(config.master_seed, "split"),
                             task_is_classification(config.task));
  } else {
    split.train = data;
  }

  TrialContext ctx;
  ctx.config = &config;
  ctx.train = &split.train;
  ctx.test = needs_split ? &split.test : &split.train;
  ctx.loss = &builtin_loss(config.task);

  SolverConfig full_config = config.auto_config.solver;
  full_config.seed = derive_seed(config.master_seed, "full-data-solution");
  ctx.full_solution =
      solve_weighted(config.task, split.train, identity_coreset(split.train.n()),
                     full_config)
          .query;
  ctx.full_total = eval_loss_column(*ctx.loss, split.train, ctx.full_solution).sum();

  struct TaskRef {
    std::size_t backend_idx;
    std::size_t size_idx;
    int trial;
  };
  std::vector<TaskRef> tasks;
  for (std::size_t b = 0; b < config.backends.size(); ++b)
    for (std::size_t s = 0; s < config.sizes.size(); ++s)
      for (int t = 0; t < config.trials; ++t) tasks.push_back({b, s, t});

  std::vector<TrialOutput> outputs(tasks.size());
  std::atomic<std::size_t> cursor{0};
  const unsigned workers = config.threads > 0
                               ? static_cast<unsigned>(config.threads)
                               : std::max(1u, std::thread::hardware_concurrency());
  auto work = [&] {
    for (;;) {
      const std::size_t k = cursor.fetch_add(1);
      if (k >= tasks.size()) return;
      const TaskRef& t = tasks[k];
      outputs[k] = run_trial(ctx, config.backends[t.backend_idx],
                             config.sizes[t.size_idx], t.trial,
                             /*with_baseline=*/t.backend_idx == 0);
    }
  };
  if (workers <= 1 || tasks.size() <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  // stable assembly: primary rows then baseline rows, sorted by backend/tau/trial
  std::vector<const nlohmann::json*> rows;
  int failed = 0;
  for (const auto& out : outputs) {
    rows.push_back(&out.primary);
    if (!out.baseline.is_null()) rows.push_back(&out.baseline);
    if (out.failed) ++failed;
  }
  std::sort(rows.begin(), rows.end(), [](const nlohmann::json* a, const nlohmann::json* b) {
    const auto ka = std::make_tuple((*a)["backend"].get<std::string>(),
                                    (*a)["tau"].get<std::int64_t>(),
                                    (*a)["trial"].get<int>());
    const auto kb = std::make_tuple((*b)["backend"].get<std::string>(),
                                    (*b)["tau"].get<std::int64_t>(),
                                    (*b)["trial"].get<int>());
    return ka < kb;
  });

  nlohmann::json results = nlohmann::json::array();
  for (const auto* row : rows) results.push_back(*row);

  // aggregates over ok trials, grouped by (backend, tau)
  nlohmann::json aggregates = nlohmann::json::array();
  std::vector<std::string> labels;
  labels.push_back("uniform-baseline");
  for (VsumBackend b : config.backends) labels.push_back(backend_name(b));
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());

  const std::vector<std::string> metric_names =
      task_is_classification(config.task)
          ? std::vector<std::string>{"approx_error", "accuracy"}
      : config.task == Task::LinearRegression
          ? std::vector<std::string>{"approx_error", "r2"}
          : std::vector<std::string>{"approx_error"};

  for (const std::string& label : labels) {
    for (Eigen::Index tau : config.sizes) {
      for (const std::string& metric : metric_names) {
        std::vector<double> values;
        for (const auto& row : results) {
          if (row["backend"] != label ||
              row["tau"].get<std::int64_t>() != static_cast<std::int64_t>(tau) ||
              row["status"] != "ok")
            continue;
          if (row["metrics"].contains(metric))
            values.push_back(row["metrics"][metric].get<double>());
        }
        if (values.empty()) continue;
        aggregates.push_back({{"backend", label},
                              {"tau", static_cast<std::int64_t>(tau)},
                              {"metric", metric},
                              {"mean", mean_of(values)},
                              {"std", std_of(values)}});
      }
    }
  }

  nlohmann::json report;
  report["schema_version"] = kReportSchemaVersion;
  report["config"] = config_to_json(config);
  report["results"] = std::move(results);
  report["aggregates"] = aggregates;
  report["timing"] = {
      {"generated_at", iso_timestamp()},
      {"total_seconds",
       std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};

  std::string out_dir = config.output_dir;
  if (const char* env = std::getenv("AUTOCORE_OUTPUT_DIR"); env && *env)
    out_dir = env;
  std::filesystem::create_directories(out_dir);

  ExperimentOutcome outcome;
  outcome.report = report;
  outcome.failed_trials = failed;
  outcome.total_trials = static_cast<int>(tasks.size());
  outcome.json_path =
      (std::filesystem::path(out_dir) / (config.run_name + ".report.json")).string();
  outcome.csv_path =
      (std::filesystem::path(out_dir) / (config.run_name + ".summary.csv")).string();

  {
    std::ofstream json_out(outcome.json_path);
    if (!json_out)
      throw std::runtime_error("cannot write report to " + outcome.json_path);
    json_out << report.dump(2) << '\n';
  }
  {
    std::ofstream csv_out(outcome.csv_path);
    if (!csv_out)
      throw std::runtime_error("cannot write summary to " + outcome.csv_path);
    csv_out << "backend,tau,metric,mean,std\n";
    for (const auto& agg : aggregates) {
      csv_out << agg["backend"].get<std::string>() << ','
              << agg["tau"].get<std::int64_t>() << ','
              << agg["metric"].get<std::string>() << ','
              << nlohmann::json(agg["mean"]).dump() << ','
              << nlohmann::json(agg["std"]).dump() << '\n';
    }
  }
  return outcome;
}

}  // namespace autocore
