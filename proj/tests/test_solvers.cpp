#include <doctest.h>

#include <cmath>
#include <set>

#include "autocore/losses.hpp"
#include "autocore/solvers.hpp"
#include "autocore/synthetic.hpp"

using namespace autocore;

namespace {

Dataset seeded_task_dataset(Task task, Eigen::Index n, Eigen::Index d,
                            std::uint64_t seed) {
  SyntheticSpec spec;
  spec.n = n;
  spec.d = d;
  spec.generator = task == Task::LinearRegression ? "linear"
                   : task == Task::KMeans         ? "mixture"
                                                  : "blobs";
  spec.noise = 1.0;
  spec.k = 2;
  return generate_synthetic(spec, seed);
}

}  // namespace

TEST_SUITE_BEGIN("solvers");

TEST_CASE("linear regression interpolates collinear points exactly") {
  Eigen::MatrixXd pts(3, 1);
  pts << 0, 1, 2;
  Eigen::VectorXd y(3);
  y << 0, 1, 2;
  Dataset d = make_dataset(pts, y);
  SolverConfig config;
  config.lambda = 0.0;
  SolverResult r = solve_weighted(Task::LinearRegression, d,
                                  identity_coreset(3), config);
  CHECK(r.query.params(0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.query.params(1) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(r.objective == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(!r.jittered);
}

TEST_CASE("normal equations leave a tiny gradient at lambda = 0") {
  Dataset d = seeded_task_dataset(Task::LinearRegression, 40, 3, 99);
  SolverConfig config;
  config.lambda = 0.0;
  SolverResult r =
      solve_weighted(Task::LinearRegression, d, identity_coreset(40), config);
  // gradient of the weighted least squares objective at the solution
  Eigen::MatrixXd design(40, 4);
  design.leftCols(3) = d.points;
  design.col(3).setOnes();
  const Eigen::VectorXd grad =
      2.0 * design.transpose() * (design * r.query.params - *d.labels);
  CHECK(grad.norm() <= 1e-8 * (1.0 + r.objective));
}

TEST_CASE("k-means with one cluster returns the weighted mean") {
  Eigen::MatrixXd pts(3, 2);
  pts << 0, 0, 3, 0, 0, 6;
  Dataset d = make_dataset(pts);
  Coreset cs;
  cs.indices = {0, 1, 2};
  cs.weights = {1.0, 2.0, 3.0};
  SolverConfig config;
  config.k = 1;
  SolverResult r = solve_weighted(Task::KMeans, d, cs, config);
  // closed form: (1*(0,0) + 2*(3,0) + 3*(0,6)) / 6 = (1, 3)
  CHECK(r.query.centers(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.query.centers(0, 1) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("weight duplication matches point duplication for every task") {
  for (Task task : {Task::LinearRegression, Task::LogisticRegression, Task::Svm,
                    Task::KMeans}) {
    CAPTURE(task_name(task));
    Dataset base = seeded_task_dataset(task, 10, 2, 700 + static_cast<int>(task));

    Coreset weighted = identity_coreset(10);
    weighted.weights[3] = 2.0;  // point 3 counted twice

    // duplicated dataset: same points with row 3 repeated adjacently
    Eigen::MatrixXd pts(11, 2);
    std::optional<Eigen::VectorXd> labels;
    if (base.has_labels()) labels = Eigen::VectorXd(11);
    Eigen::Index out = 0;
    for (Eigen::Index i = 0; i < 10; ++i) {
      pts.row(out) = base.points.row(i);
      if (labels) (*labels)(out) = base.label(i);
      ++out;
      if (i == 3) {
        pts.row(out) = base.points.row(i);
        if (labels) (*labels)(out) = base.label(i);
        ++out;
      }
    }
    Dataset duplicated = make_dataset(pts, labels);

    SolverConfig config;
    config.k = 2;
    config.seed = 5;
    config.max_iterations = 2000;
    SolverResult a = solve_weighted(task, base, weighted, config);
    SolverResult b = solve_weighted(task, duplicated, identity_coreset(11), config);
    CHECK(query_distance(a.query, b.query) < 1e-6);
  }
}

TEST_CASE("logistic and svm never end above their zero-query objective") {
  for (Task task : {Task::LogisticRegression, Task::Svm}) {
    for (std::uint64_t seed : {1, 2, 3}) {
      Dataset d = seeded_task_dataset(task, 30, 3, 4000 + seed);
      SolverConfig config;
      config.seed = seed;
      SolverResult r = solve_weighted(task, d, identity_coreset(30), config);
      Query zero;
      zero.kind = task;
      zero.params = Eigen::VectorXd::Zero(4);
      const double at_zero =
          weighted_objective(task, d, identity_coreset(30), config, zero);
      CHECK(r.objective <= at_zero + 1e-12);
      CHECK(r.objective ==
            doctest::Approx(weighted_objective(task, d, identity_coreset(30),
                                               config, r.query))
                .epsilon(1e-9));
    }
  }
}

TEST_CASE("lloyd cost is non-increasing across iterations") {
  Dataset d = seeded_task_dataset(Task::KMeans, 60, 2, 2024);
  SolverConfig config;
  config.k = 3;
  config.seed = 11;
  double previous = std::numeric_limits<double>::infinity();
  for (int iters = 1; iters <= 8; ++iters) {
    config.max_iterations = iters;
    SolverResult r = solve_weighted(Task::KMeans, d, identity_coreset(60), config);
    CHECK(r.objective <= previous + 1e-9);
    previous = r.objective;
  }
}

TEST_CASE("solver rejects empty and zero-weight coresets") {
  Dataset d = seeded_task_dataset(Task::Svm, 10, 2, 5);
  SolverConfig config;
  Coreset empty;
  CHECK_THROWS_AS(solve_weighted(Task::Svm, d, empty, config), std::invalid_argument);
  Coreset zeros = identity_coreset(10);
  for (double& w : zeros.weights) w = 0.0;
  CHECK_THROWS_AS(solve_weighted(Task::Svm, d, zeros, config), std::invalid_argument);
}

TEST_CASE("initial_solutions covers the whole set when it is small") {
  Dataset d = seeded_task_dataset(Task::LinearRegression, 5, 2, 31);
  SolverConfig config;
  config.lambda = 0.5;
  std::vector<Query> queries = initial_solutions(Task::LinearRegression, d, 1, config, 9);
  REQUIRE(queries.size() == 1);
  SolverResult full =
      solve_weighted(Task::LinearRegression, d, identity_coreset(5), config);
  CHECK(query_distance(queries[0], full.query) < 1e-9);
}

TEST_CASE("initial_solutions is deterministic in the seed") {
  Dataset d = seeded_task_dataset(Task::LogisticRegression, 400, 4, 77);
  SolverConfig config;
  std::vector<Query> a = initial_solutions(Task::LogisticRegression, d, 4, config, 123);
  std::vector<Query> b = initial_solutions(Task::LogisticRegression, d, 4, config, 123);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(query_distance(a[i], b[i]) == 0.0);
}

TEST_CASE("ten initial solutions are distinct and near the full optimum") {
  SyntheticSpec blob_spec;
  blob_spec.generator = "blobs";
  blob_spec.n = 1500;
  blob_spec.d = 4;
  blob_spec.noise = 2.5;      // overlapping classes keep the optimum away from zero
  blob_spec.separation = 4.0;
  Dataset d = generate_synthetic(blob_spec, 314);
  SolverConfig config;
  const LossFunction& loss = builtin_loss(Task::LogisticRegression);

  std::vector<Query> queries =
      initial_solutions(Task::LogisticRegression, d, 10, config, 2718);
  REQUIRE(queries.size() == 10);
  for (std::size_t a = 0; a < queries.size(); ++a)
    for (std::size_t b = a + 1; b < queries.size(); ++b)
      CHECK(query_distance(queries[a], queries[b]) > 0.0);

  SolverResult full =
      solve_weighted(Task::LogisticRegression, d, identity_coreset(d.n()), config);
  const double optimum = eval_loss_column(loss, d, full.query).sum();
  for (const Query& q : queries) {
    const double loss_at = eval_loss_column(loss, d, q).sum();
    CHECK(loss_at <= 3.0 * optimum);
  }
}

TEST_CASE("stratified subsets keep the minority class present") {
  SyntheticSpec spec;
  spec.generator = "blobs";
  spec.n = 600;
  spec.d = 3;
  spec.balance = 0.05;  // tiny positive class
  Dataset d = generate_synthetic(spec, 99);
  SolverConfig config;
  config.initial_subset_floor = 64;
  // the sub-solves only see stratified subsets; a degenerate one-class subset
  // would push the svm toward a constant predictor far from the full solution
  std::vector<Query> queries = initial_solutions(Task::Svm, d, 5, config, 17);
  SolverResult full = solve_weighted(Task::Svm, d, identity_coreset(600), config);
  const LossFunction& loss = builtin_loss(Task::Svm);
  const double optimum = eval_loss_column(loss, d, full.query).sum();
  for (const Query& q : queries)
    CHECK(eval_loss_column(loss, d, q).sum() <= 5.0 * (optimum + 1.0));
}

TEST_SUITE_END();
