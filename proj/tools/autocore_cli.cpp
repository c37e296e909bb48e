#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "autocore/autocoreset.hpp"
#include "autocore/csv.hpp"
#include "autocore/experiment.hpp"
#include "autocore/metrics.hpp"
#include "autocore/report_schema.hpp"
#include "autocore/rng.hpp"
#include "autocore/synthetic.hpp"

namespace {

using autocore::ExperimentConfig;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitPartialFailure = 1;
constexpr int kExitConfigError = 2;

struct RunFlags {
  std::string config_file;
  std::string task;
  std::vector<std::string> backends;
  std::vector<std::int64_t> sizes;
  int trials = 16;
  int m = 10;
  int patience = 7;
  std::string mode = "optimal";
  std::string error_mode = "additive";
  int max_iterations = 200;
  std::uint64_t seed = 0;
  std::string out_dir = "reports";
  std::string run_name = "experiment";
  int threads = 0;
  bool standardize = false;
  double test_fraction = 0.2;
  double lambda = 1.0;
  int solver_max_iterations = 1000;
  double tolerance = 1e-10;
  int k = 2;
  std::string csv_path;
  std::string label_column;
  std::string generator;
  std::int64_t synth_n = 2000;
  std::int64_t synth_d = 5;
  double synth_noise = 1.0;
  int synth_k = 3;
  double synth_balance = 0.5;
  double synth_separation = 8.0;
};

int add_run_command(CLI::App& app, RunFlags& flags) {
  auto* run = app.add_subcommand("run", "run an experiment sweep");
  run->add_option("--config", flags.config_file, "JSON config file");
  run->add_option("--task", flags.task,
                  "linear-regression | logistic-regression | svm | kmeans");
  run->add_option("--backend", flags.backends,
                  "vsum backend (repeatable): caratheodory | frank_wolfe | "
                  "median_of_means | sensitivity | uniform");
  run->add_option("--tau", flags.sizes, "coreset size sweep (repeatable)");
  run->add_option("--trials", flags.trials, "trials per sweep point");
  run->add_option("--m", flags.m, "number of initial solutions");
  run->add_option("--patience", flags.patience, "stopping patience");
  run->add_option("--mode", flags.mode, "optimal | last");
  run->add_option("--error-mode", flags.error_mode, "additive | multiplicative");
  run->add_option("--max-iterations", flags.max_iterations, "loop iteration cap");
  run->add_option("--seed", flags.seed, "master seed");
  run->add_option("--out-dir", flags.out_dir,
                  "output directory (AUTOCORE_OUTPUT_DIR overrides)");
  run->add_option("--run-name", flags.run_name, "report file stem");
  run->add_option("--threads", flags.threads, "worker threads (0 = hardware)");
  run->add_flag("--standardize", flags.standardize, "standardize features");
  run->add_option("--test-fraction", flags.test_fraction, "held-out fraction");
  run->add_option("--lambda", flags.lambda, "solver regularization");
  run->add_option("--solver-max-iterations", flags.solver_max_iterations,
                  "solver iteration cap");
  run->add_option("--tolerance", flags.tolerance, "solver tolerance");
  run->add_option("--k", flags.k, "k-means cluster count");
  run->add_option("--csv", flags.csv_path, "input CSV path");
  run->add_option("--label-col", flags.label_column, "label column name");
  run->add_option("--synth-generator", flags.generator, "blobs | linear | mixture");
  run->add_option("--synth-n", flags.synth_n, "synthetic point count");
  run->add_option("--synth-d", flags.synth_d, "synthetic dimension");
  run->add_option("--synth-noise", flags.synth_noise, "synthetic noise scale");
  run->add_option("--synth-k", flags.synth_k, "synthetic mixture components");
  run->add_option("--synth-balance", flags.synth_balance, "synthetic class balance");
  run->add_option("--synth-separation", flags.synth_separation,
                  "synthetic cluster separation");
  return 0;
}

// flag name -> json config key; a key set in both places is an error
const std::vector<std::pair<std::string, std::string>> kFlagToKey = {
    {"--task", "task"},           {"--backend", "backends"},
    {"--tau", "sizes"},           {"--trials", "trials"},
    {"--m", "m"},                 {"--patience", "patience"},
    {"--mode", "mode"},           {"--error-mode", "error_mode"},
    {"--max-iterations", "max_iterations"},
    {"--seed", "master_seed"},    {"--standardize", "standardize"},
    {"--test-fraction", "test_fraction"},
    {"--lambda", "solver"},       {"--solver-max-iterations", "solver"},
    {"--tolerance", "solver"},    {"--k", "solver"},
    {"--csv", "csv_path"},        {"--label-col", "label_column"},
    {"--synth-generator", "synthetic"}, {"--synth-n", "synthetic"},
    {"--synth-d", "synthetic"},   {"--synth-noise", "synthetic"},
    {"--synth-k", "synthetic"},   {"--synth-balance", "synthetic"},
    {"--run-name", "run_name"},
};

ExperimentConfig build_config(const CLI::App* run, const RunFlags& flags) {
  json file_config;
  if (!flags.config_file.empty()) {
    std::ifstream in(flags.config_file);
    if (!in) throw std::invalid_argument("cannot open config file: " + flags.config_file);
    in >> file_config;
    for (const auto& [flag, key] : kFlagToKey) {
      if (file_config.contains(key) && run->count(flag) > 0)
        throw std::invalid_argument("'" + key + "' set in both config file and flag " +
                                    flag + "; pick one");
    }
  }

  ExperimentConfig config;
  if (!file_config.is_null()) config = autocore::config_from_json(file_config);

  auto set_if = [&](const std::string& flag, auto&& apply) {
    if (run->count(flag) > 0) apply();
  };
  set_if("--task", [&] { config.task = autocore::task_from_name(flags.task); });
  set_if("--backend", [&] {
    config.backends.clear();
    for (const auto& b : flags.backends)
      config.backends.push_back(autocore::backend_from_name(b));
  });
  set_if("--tau", [&] {
    config.sizes.assign(flags.sizes.begin(), flags.sizes.end());
  });
  set_if("--trials", [&] { config.trials = flags.trials; });
  set_if("--m", [&] { config.auto_config.m = flags.m; });
  set_if("--patience", [&] { config.auto_config.patience = flags.patience; });
  set_if("--mode", [&] {
    config.auto_config.mode = flags.mode == "last" ? autocore::CoresetMode::Last
                                                   : autocore::CoresetMode::Optimal;
  });
  set_if("--error-mode", [&] {
    config.auto_config.error_mode = flags.error_mode == "multiplicative"
                                        ? autocore::ErrorMode::Multiplicative
                                        : autocore::ErrorMode::Additive;
  });
  set_if("--max-iterations",
         [&] { config.auto_config.max_iterations = flags.max_iterations; });
  set_if("--seed", [&] { config.master_seed = flags.seed; });
  set_if("--standardize", [&] { config.standardize = flags.standardize; });
  set_if("--test-fraction", [&] { config.test_fraction = flags.test_fraction; });
  set_if("--lambda", [&] { config.auto_config.solver.lambda = flags.lambda; });
  set_if("--solver-max-iterations",
         [&] { config.auto_config.solver.max_iterations = flags.solver_max_iterations; });
  set_if("--tolerance", [&] { config.auto_config.solver.tolerance = flags.tolerance; });
  set_if("--k", [&] { config.auto_config.solver.k = flags.k; });
  set_if("--csv", [&] { config.csv_path = flags.csv_path; });
  set_if("--label-col", [&] { config.label_column = flags.label_column; });
  set_if("--run-name", [&] { config.run_name = flags.run_name; });
  if (run->count("--synth-generator") > 0) {
    autocore::SyntheticSpec spec;
    spec.generator = flags.generator;
    spec.n = flags.synth_n;
    spec.d = flags.synth_d;
    spec.noise = flags.synth_noise;
    spec.k = flags.synth_k;
    spec.balance = flags.synth_balance;
    spec.separation = flags.synth_separation;
    config.synthetic = spec;
  }
  config.output_dir = flags.out_dir;
  config.threads = flags.threads;

  if (config.csv_path.empty() && !config.synthetic)
    throw std::invalid_argument("need either --csv or --synth-generator (or config keys)");
  return config;
}

int run_check();

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"automatic coreset construction: loss-matrix summarization "
               "with pluggable vector-summarization backends"};
  app.require_subcommand(1);

  RunFlags flags;
  add_run_command(app, flags);

  // synth
  std::string synth_generator = "blobs";
  std::int64_t synth_n = 1000, synth_d = 2;
  double synth_noise = 1.0, synth_balance = 0.5, synth_separation = 8.0;
  int synth_k = 3;
  std::uint64_t synth_seed = 0;
  std::string synth_out = "synthetic.csv";
  std::string synth_label = "label";
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset CSV");
  synth->add_option("--generator", synth_generator, "blobs | linear | mixture")->required();
  synth->add_option("--n", synth_n, "points");
  synth->add_option("--d", synth_d, "dimensions");
  synth->add_option("--noise", synth_noise, "noise scale");
  synth->add_option("--k", synth_k, "mixture components");
  synth->add_option("--balance", synth_balance, "class balance");
  synth->add_option("--separation", synth_separation, "cluster separation");
  synth->add_option("--seed", synth_seed, "seed");
  synth->add_option("--out", synth_out, "output CSV path");
  synth->add_option("--label-col", synth_label, "label column name");

  std::string check_report;
  auto* check = app.add_subcommand("check", "run the built-in invariant suites");
  check->add_option("--report", check_report,
                    "validate an existing JSON report against the schema");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("run")) {
      ExperimentConfig config;
      try {
        config = build_config(app.get_subcommand("run"), flags);
      } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
      }
      autocore::ExperimentOutcome outcome = autocore::run_experiment(config);
      std::cout << "report:  " << outcome.json_path << '\n'
                << "summary: " << outcome.csv_path << '\n'
                << "trials:  " << outcome.total_trials - outcome.failed_trials << '/'
                << outcome.total_trials << " ok\n";
      return outcome.failed_trials > 0 ? kExitPartialFailure : kExitOk;
    }

    if (app.got_subcommand("synth")) {
      autocore::SyntheticSpec spec;
      spec.generator = synth_generator;
      spec.n = synth_n;
      spec.d = synth_d;
      spec.noise = synth_noise;
      spec.k = synth_k;
      spec.balance = synth_balance;
      spec.separation = synth_separation;
      autocore::Dataset data = autocore::generate_synthetic(spec, synth_seed);
      autocore::write_csv(synth_out, data, synth_label);
      std::cout << "wrote " << data.n() << " x " << data.dim() << " dataset to "
                << synth_out << '\n';
      return kExitOk;
    }

    if (app.got_subcommand("check")) {
      if (!check_report.empty()) {
        std::ifstream in(check_report);
        if (!in) {
          std::cerr << "cannot open " << check_report << '\n';
          return kExitConfigError;
        }
        json report;
        in >> report;
        std::string error;
        if (!autocore::validate_schema(report, autocore::report_schema(), &error)) {
          std::cout << "FAIL schema: " << error << '\n';
          return kExitPartialFailure;
        }
        std::cout << "PASS schema: " << check_report << '\n';
        return kExitOk;
      }
      return run_check();
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPartialFailure;
  }
  return kExitOk;
}

namespace {

// Quick self-checks over the main invariants; one line per suite.
int run_check() {
  using namespace autocore;
  int failures = 0;
  auto report = [&](const std::string& name, bool ok) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << '\n';
    if (!ok) ++failures;
  };

  {  // backend contracts on random matrices
    bool ok = true;
    Rng rng(7);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int rep = 0; rep < 10 && ok; ++rep) {
      const Eigen::Index n = 16 + 13 * rep;
      const Eigen::Index z = 1 + rep % 6;
      RowMatrix entries(n, z);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < z; ++j) entries(i, j) = std::abs(gauss(rng));
      std::vector<Query> queries(static_cast<std::size_t>(z));
      LossMatrix matrix = make_loss_matrix(entries, queries);
      const double bound =
          1e-9 * (1.0 + matrix.entries.colwise().sum().squaredNorm());
      Coreset cara = caratheodory(matrix, rep);
      ok = ok && static_cast<Eigen::Index>(cara.size()) <= z + 1 &&
           cara.vsum_error <= bound;
      for (VsumBackend b : {VsumBackend::FrankWolfe, VsumBackend::MedianOfMeans,
                            VsumBackend::Sensitivity, VsumBackend::Uniform}) {
        VsumRequest req;
        req.backend = b;
        req.target_size = std::min<Eigen::Index>(8, n);
        req.seed = static_cast<std::uint64_t>(rep);
        Coreset cs = build_vsum_coreset(matrix, req);
        ok = ok && std::isfinite(cs.vsum_error);
        for (double w : cs.weights) ok = ok && w >= 0.0;
      }
    }
    report("vsum backend contracts", ok);
  }

  {  // loss nonnegativity probes
    bool ok = true;
    for (Task task : {Task::LinearRegression, Task::LogisticRegression, Task::Svm,
                      Task::KMeans}) {
      try {
        LossFunction probe = builtin_loss(task);
        probe.name += "-probe";
        register_loss(probe);
      } catch (const std::exception&) {
        ok = false;
      }
    }
    report("loss nonnegativity probes", ok);
  }

  {  // stopping rule replay
    bool ok = true;
    Rng rng(11);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int rep = 0; rep < 50 && ok; ++rep) {
      StoppingState state;
      double best = std::numeric_limits<double>::infinity();
      int counter = 0;
      for (int step = 0; step < 64; ++step) {
        const double sum = unif(rng);
        auto [next, decision] = stopping_update(state, sum, 5);
        state = next;
        if (sum < best) {
          best = sum;
          counter = 0;
        } else {
          ++counter;
        }
        const bool expect_stop = counter >= 5;
        if ((decision == StopDecision::Stop) != expect_stop) ok = false;
        if (expect_stop) break;
      }
    }
    report("stopping rule replay", ok);
  }

  {  // report schema accepts a small end-to-end run
    bool ok = true;
    try {
      ExperimentConfig config;
      SyntheticSpec spec;
      spec.generator = "blobs";
      spec.n = 120;
      spec.d = 3;
      config.synthetic = spec;
      config.task = Task::LogisticRegression;
      config.backends = {VsumBackend::Uniform};
      config.sizes = {16};
      config.trials = 1;
      config.auto_config.m = 3;
      config.auto_config.patience = 2;
      config.auto_config.max_iterations = 6;
      config.auto_config.solver.max_iterations = 100;
      config.output_dir =
          (std::filesystem::temp_directory_path() / "autocore-check").string();
      config.run_name = "check";
      ExperimentOutcome outcome = run_experiment(config);
      std::string error;
      ok = validate_schema(outcome.report, report_schema(), &error) &&
           outcome.failed_trials == 0;
    } catch (const std::exception&) {
      ok = false;
    }
    report("experiment report schema", ok);
  }

  return failures == 0 ? kExitOk : kExitPartialFailure;
}

}  // namespace
