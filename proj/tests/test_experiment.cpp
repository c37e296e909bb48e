#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "autocore/csv.hpp"
#include "autocore/experiment.hpp"
#include "autocore/metrics.hpp"
#include "autocore/report_schema.hpp"
#include "autocore/rng.hpp"
#include "autocore/solvers.hpp"

using namespace autocore;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("autocore-tests-" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ExperimentConfig tiny_config(const fs::path& out_dir) {
  ExperimentConfig config;
  SyntheticSpec spec;
  spec.generator = "blobs";
  spec.n = 200;
  spec.d = 3;
  config.synthetic = spec;
  config.task = Task::LogisticRegression;
  config.backends = {VsumBackend::Caratheodory};
  config.sizes = {16};
  config.trials = 1;
  config.auto_config.m = 3;
  config.auto_config.patience = 2;
  config.auto_config.max_iterations = 8;
  config.auto_config.solver.max_iterations = 200;
  config.master_seed = 11;
  config.output_dir = out_dir.string();
  return config;
}

}  // namespace

TEST_SUITE_BEGIN("experiment");

TEST_CASE("load_csv maps binary labels by lexicographic order") {
  fs::path dir = temp_dir("csv-labels");
  fs::path file = dir / "tiny.csv";
  std::ofstream(file) << "x,y,label\n0,0,a\n1,1,b\n2,2,b\n";

  Dataset d = load_csv(file.string(), "label", Task::Svm);
  CHECK(d.n() == 3);
  CHECK(d.dim() == 2);
  CHECK(d.label(0) == -1.0);
  CHECK(d.label(1) == 1.0);
  CHECK(d.label(2) == 1.0);
}

TEST_CASE("load_csv without the label column is a configuration error") {
  fs::path dir = temp_dir("csv-missing");
  fs::path file = dir / "tiny.csv";
  std::ofstream(file) << "x,y\n0,0\n1,1\n";
  CHECK_THROWS_AS(load_csv(file.string(), "label", Task::Svm), std::invalid_argument);
  // unlabeled clustering data loads fine
  CHECK_NOTHROW(load_csv(file.string(), "", Task::KMeans));
}

TEST_CASE("load_csv reports non-numeric cells with their position") {
  fs::path dir = temp_dir("csv-bad");
  fs::path file = dir / "tiny.csv";
  std::ofstream(file) << "x,y,label\n0,oops,a\n1,1,b\n";
  try {
    load_csv(file.string(), "label", Task::Svm);
    FAIL("expected a parse error");
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    CHECK(what.find("row 1") != std::string::npos);
    CHECK(what.find("column 1") != std::string::npos);
  }
}

TEST_CASE("load_csv rejects more than two classes for binary tasks") {
  fs::path dir = temp_dir("csv-classes");
  fs::path file = dir / "tiny.csv";
  std::ofstream(file) << "x,label\n0,a\n1,b\n2,c\n";
  CHECK_THROWS_AS(load_csv(file.string(), "label", Task::LogisticRegression),
                  std::invalid_argument);
}

TEST_CASE("csv round-trip preserves features bit-exactly") {
  SyntheticSpec spec;
  spec.generator = "linear";
  spec.n = 64;
  spec.d = 5;
  Dataset data = generate_synthetic(spec, 2091);

  fs::path dir = temp_dir("csv-roundtrip");
  fs::path file = dir / "data.csv";
  write_csv(file.string(), data, "target");
  Dataset reload = load_csv(file.string(), "target", Task::LinearRegression);

  REQUIRE(reload.n() == data.n());
  REQUIRE(reload.dim() == data.dim());
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    for (Eigen::Index j = 0; j < data.dim(); ++j)
      CHECK(reload.points(i, j) == data.points(i, j));
    CHECK(reload.label(i) == data.label(i));
  }
}

TEST_CASE("separable blobs train to perfect accuracy") {
  SyntheticSpec spec;
  spec.generator = "blobs";
  spec.n = 100;
  spec.d = 2;
  spec.noise = 0.0;  // two point masses
  Dataset data = generate_synthetic(spec, 5);
  SolverConfig config;
  Query q = solve_weighted(Task::Svm, data, identity_coreset(100), config).query;
  CHECK(classification_metrics(data, q).accuracy == 1.0);
}

TEST_CASE("noiseless linear data fits with r2 = 1") {
  SyntheticSpec spec;
  spec.generator = "linear";
  spec.n = 120;
  spec.d = 3;
  spec.noise = 0.0;
  Dataset data = generate_synthetic(spec, 6);
  SolverConfig config;
  config.lambda = 0.0;
  Query q =
      solve_weighted(Task::LinearRegression, data, identity_coreset(120), config).query;
  CHECK(r_squared(data, q) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("a separated 3-mixture clusters 10x better with k=3 than k=1") {
  SyntheticSpec spec;
  spec.generator = "mixture";
  spec.n = 300;
  spec.d = 3;
  spec.k = 3;
  spec.noise = 0.5;
  spec.separation = 25.0;
  Dataset data = generate_synthetic(spec, 7);

  // one-cluster cost has a closed form around the mean
  const Eigen::RowVectorXd mean = data.points.colwise().mean();
  double cost1 = 0.0;
  for (Eigen::Index i = 0; i < data.n(); ++i)
    cost1 += (data.points.row(i) - mean).squaredNorm();

  SolverConfig config;
  config.k = 3;
  config.seed = 3;
  SolverResult three = solve_weighted(Task::KMeans, data, identity_coreset(300), config);
  CHECK(three.objective * 10.0 <= cost1);
}

TEST_CASE("unknown generator is rejected") {
  SyntheticSpec spec;
  spec.generator = "spirals";
  CHECK_THROWS_AS(generate_synthetic(spec, 0), std::invalid_argument);
}

TEST_CASE("single-trial experiment emits the method row plus the baseline") {
  fs::path dir = temp_dir("experiment-rows");
  ExperimentOutcome outcome = run_experiment(tiny_config(dir));
  CHECK(outcome.failed_trials == 0);
  REQUIRE(outcome.report["results"].size() == 2);
  CHECK(outcome.report["results"][0]["backend"] == "caratheodory");
  CHECK(outcome.report["results"][1]["backend"] == "uniform-baseline");
  CHECK(fs::exists(outcome.json_path));
  CHECK(fs::exists(outcome.csv_path));

  std::ifstream csv(outcome.csv_path);
  std::string header;
  std::getline(csv, header);
  CHECK(header == "backend,tau,metric,mean,std");
}

TEST_CASE("reports validate against the shipped schema") {
  fs::path dir = temp_dir("experiment-schema");
  ExperimentOutcome outcome = run_experiment(tiny_config(dir));
  std::string error;
  CHECK(validate_schema(outcome.report, report_schema(), &error));
  CHECK(error.empty());

  // the embedded schema and the repo copy stay in lockstep
  std::ifstream schema_file(std::string(AUTOCORE_SOURCE_DIR) +
                            "/share/report.schema.json");
  REQUIRE(schema_file.good());
  nlohmann::json repo_schema;
  schema_file >> repo_schema;
  CHECK(repo_schema == report_schema());
}

TEST_CASE("default config echoes the reference protocol values") {
  fs::path dir = temp_dir("experiment-echo");
  ExperimentConfig config = tiny_config(dir);
  config.auto_config = AutoConfig{};  // stock defaults
  config.auto_config.solver.max_iterations = 150;
  config.trials = 16;
  config.sizes = {24};
  config.run_name = "echo";
  ExperimentOutcome outcome = run_experiment(config);
  CHECK(outcome.report["config"]["m"] == 10);
  CHECK(outcome.report["config"]["patience"] == 7);
  CHECK(outcome.report["config"]["trials"] == 16);
  CHECK(outcome.report["results"].size() == 32);  // 16 trials x (method + baseline)
}

TEST_CASE("aggregates recompute exactly from per-trial values") {
  fs::path dir = temp_dir("experiment-aggregates");
  ExperimentConfig config = tiny_config(dir);
  config.trials = 4;
  ExperimentOutcome outcome = run_experiment(config);
  for (const auto& agg : outcome.report["aggregates"]) {
    std::vector<double> values;
    for (const auto& row : outcome.report["results"]) {
      if (row["backend"] == agg["backend"] && row["tau"] == agg["tau"] &&
          row["status"] == "ok" && row["metrics"].contains(agg["metric"]))
        values.push_back(row["metrics"][agg["metric"].get<std::string>()].get<double>());
    }
    REQUIRE(!values.empty());
    CHECK(agg["mean"].get<double>() ==
          doctest::Approx(mean_of(values)).epsilon(1e-12));
    CHECK(agg["std"].get<double>() ==
          doctest::Approx(std_of(values)).epsilon(1e-12));
  }
}

TEST_CASE("per-trial seeds are derivable from the master seed") {
  fs::path dir = temp_dir("experiment-seeds");
  ExperimentConfig config = tiny_config(dir);
  config.trials = 3;
  ExperimentOutcome outcome = run_experiment(config);
  for (const auto& row : outcome.report["results"]) {
    const std::uint64_t expected =
        trial_seed(config.master_seed, row["backend"].get<std::string>(),
                   row["tau"].get<std::int64_t>(), row["trial"].get<int>());
    CHECK(row["seed"].get<std::uint64_t>() == expected);
  }
}

TEST_CASE("reruns are byte-identical outside the timing field") {
  ExperimentConfig config = tiny_config(temp_dir("determinism-a"));
  config.trials = 2;
  config.threads = 2;
  ExperimentOutcome first = run_experiment(config);
  config.output_dir = temp_dir("determinism-b").string();
  ExperimentOutcome second = run_experiment(config);

  nlohmann::json a = first.report;
  nlohmann::json b = second.report;
  a.erase("timing");
  b.erase("timing");
  CHECK(a.dump() == b.dump());
}

TEST_CASE("config json round-trips") {
  ExperimentConfig config = tiny_config("unused");
  config.backends = {VsumBackend::Sensitivity, VsumBackend::Uniform};
  config.sizes = {8, 16};
  config.auto_config.error_mode = ErrorMode::Multiplicative;
  config.auto_config.mode = CoresetMode::Last;
  ExperimentConfig restored = config_from_json(config_to_json(config));
  CHECK(config_to_json(restored) == config_to_json(config));
}

TEST_CASE("baseline replays the paired run's initial solutions exactly") {
  SyntheticSpec spec;
  spec.generator = "blobs";
  spec.n = 150;
  spec.d = 3;
  Dataset data = generate_synthetic(spec, 55);
  const LossFunction& loss = builtin_loss(Task::LogisticRegression);

  AutoConfig config;
  config.m = 4;
  config.patience = 2;
  config.tau = 12;
  config.max_iterations = 6;
  config.seed = trial_seed(99, "caratheodory", 12, 0);
  config.solver.max_iterations = 150;
  AutoResult run = autocoreset(data, loss, Task::LogisticRegression, config);

  SolverConfig init_solver = config.solver;
  init_solver.seed = derive_seed(config.seed, "solver-init");
  LossMatrix replayed = initial_loss_matrix(data, loss, Task::LogisticRegression,
                                            config.m, init_solver, false);
  REQUIRE(replayed.cols() == config.m);
  for (Eigen::Index j = 0; j < config.m; ++j)
    for (Eigen::Index i = 0; i < data.n(); ++i)
      CHECK(replayed.entries(i, j) == run.matrix.entries(i, j));
}

TEST_CASE("standardize and multiplicative mode run through the sweep") {
  fs::path dir = temp_dir("experiment-standardize");
  ExperimentConfig config = tiny_config(dir);
  config.standardize = true;
  config.auto_config.error_mode = ErrorMode::Multiplicative;
  ExperimentOutcome outcome = run_experiment(config);
  CHECK(outcome.failed_trials == 0);
  CHECK(outcome.report["config"]["standardize"] == true);
  CHECK(outcome.report["config"]["error_mode"] == "multiplicative");
}

TEST_CASE("AUTOCORE_OUTPUT_DIR overrides the configured directory") {
  fs::path configured = temp_dir("experiment-env-a");
  fs::path overridden = temp_dir("experiment-env-b");
  setenv("AUTOCORE_OUTPUT_DIR", overridden.string().c_str(), 1);
  ExperimentConfig config = tiny_config(configured);
  ExperimentOutcome outcome = run_experiment(config);
  unsetenv("AUTOCORE_OUTPUT_DIR");
  CHECK(fs::path(outcome.json_path).parent_path() == overridden);
  CHECK(fs::exists(outcome.json_path));
}

TEST_CASE("invalid sweeps are rejected") {
  ExperimentConfig config = tiny_config(temp_dir("experiment-invalid"));
  config.sizes = {10000};  // larger than n
  CHECK_THROWS_AS(run_experiment(config), std::invalid_argument);
  config.sizes = {};
  CHECK_THROWS_AS(run_experiment(config), std::invalid_argument);
}

TEST_SUITE_END();
