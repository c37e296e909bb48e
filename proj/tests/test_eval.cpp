#include <doctest.h>

#include <cmath>

#include "autocore/metrics.hpp"
#include "autocore/synthetic.hpp"
#include "autocore/vsum.hpp"

using namespace autocore;

TEST_SUITE_BEGIN("eval");

TEST_CASE("approximation error of the identity coreset is zero for every task") {
  for (Task task : {Task::LinearRegression, Task::LogisticRegression, Task::Svm,
                    Task::KMeans}) {
    SyntheticSpec spec;
    spec.n = 60;
    spec.d = 3;
    spec.generator = task == Task::LinearRegression ? "linear"
                     : task == Task::KMeans         ? "mixture"
                                                    : "blobs";
    Dataset data = generate_synthetic(spec, 5 + static_cast<int>(task));
    SolverConfig config;
    config.k = 2;
    config.seed = 7;
    const double eps = approximation_error(data, builtin_loss(task), task,
                                           identity_coreset(60), config);
    CHECK(eps == 0.0);
  }
}

TEST_CASE("symmetric k-means instance has zero approximation error") {
  Eigen::MatrixXd pts(4, 2);
  pts << 0, 0, 0, 2, 2, 0, 2, 2;
  Dataset data = make_dataset(pts);
  Coreset cs;
  cs.indices = {0, 3};
  cs.weights = {2.0, 2.0};
  SolverConfig config;
  config.k = 1;
  const double eps =
      approximation_error(data, builtin_loss(Task::KMeans), Task::KMeans, cs, config);
  // coreset mean (1,1) coincides with the full mean
  CHECK(eps == 0.0);
}

TEST_CASE("approximation error matches an explicit two-solve recomputation") {
  SyntheticSpec spec;
  spec.generator = "blobs";
  spec.n = 240;
  spec.d = 4;
  Dataset data = generate_synthetic(spec, 88);
  const LossFunction& loss = builtin_loss(Task::LogisticRegression);

  LossMatrix probe = [&] {
    SolverConfig sc;
    std::vector<Query> queries =
        initial_solutions(Task::LogisticRegression, data, 3, sc, 4);
    RowMatrix entries(data.n(), 3);
    for (int j = 0; j < 3; ++j)
      entries.col(j) = eval_loss_column(loss, data, queries[static_cast<std::size_t>(j)]);
    return make_loss_matrix(entries, queries);
  }();
  Coreset cs = sensitivity_sampling(probe, 30, 0.1, 11);

  SolverConfig config;
  config.seed = 3;
  const double eps = approximation_error(data, loss, Task::LogisticRegression, cs, config);

  const Query on_coreset =
      solve_weighted(Task::LogisticRegression, data, cs, config).query;
  const Query on_full =
      solve_weighted(Task::LogisticRegression, data, identity_coreset(240), config).query;
  const double expected = std::abs(eval_loss_column(loss, data, on_coreset).sum() -
                                   eval_loss_column(loss, data, on_full).sum());
  CHECK(eps == doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("classification metrics on fully correct predictions") {
  Eigen::MatrixXd pts(10, 1);
  Eigen::VectorXd labels(10);
  for (int i = 0; i < 10; ++i) {
    pts(i, 0) = i < 5 ? -2.0 : 2.0;
    labels(i) = i < 5 ? -1.0 : 1.0;
  }
  Dataset test = make_dataset(pts, labels);
  Query q;
  q.kind = Task::Svm;
  q.params = (Eigen::VectorXd(2) << 1.0, 0.0).finished();
  ClassificationMetrics cm = classification_metrics(test, q);
  CHECK(cm.accuracy == 1.0);
  CHECK(cm.confusion[0][1] == 0);
  CHECK(cm.confusion[1][0] == 0);
  CHECK(cm.confusion[0][0] + cm.confusion[1][1] == 10);
}

TEST_CASE("classification metrics worked 3-point example") {
  // predictions [+,+,-] against labels [+,-,-]
  Eigen::MatrixXd pts(3, 1);
  pts << 1.0, 1.0, -1.0;
  Eigen::VectorXd labels(3);
  labels << 1.0, -1.0, -1.0;
  Dataset test = make_dataset(pts, labels);
  Query q;
  q.kind = Task::LogisticRegression;
  q.params = (Eigen::VectorXd(2) << 1.0, 0.0).finished();
  ClassificationMetrics cm = classification_metrics(test, q);
  CHECK(cm.accuracy == doctest::Approx(2.0 / 3.0));
  CHECK(cm.confusion[0][0] == 1);  // TN
  CHECK(cm.confusion[0][1] == 1);  // FP
  CHECK(cm.confusion[1][0] == 0);  // FN
  CHECK(cm.confusion[1][1] == 1);  // TP
}

TEST_CASE("zero score predicts +1") {
  Eigen::MatrixXd pts(1, 1);
  pts << 0.0;
  Eigen::VectorXd labels(1);
  labels << 1.0;
  Dataset test = make_dataset(pts, labels);
  Query q;
  q.kind = Task::Svm;
  q.params = (Eigen::VectorXd(2) << 1.0, 0.0).finished();
  CHECK(classification_metrics(test, q).accuracy == 1.0);
}

TEST_CASE("classification metrics match a naive counting oracle") {
  SyntheticSpec spec;
  spec.generator = "blobs";
  spec.n = 500;
  spec.d = 3;
  spec.noise = 3.0;
  Dataset test = generate_synthetic(spec, 606);
  Query q;
  q.kind = Task::Svm;
  q.params = (Eigen::VectorXd(4) << 0.4, -0.2, 0.9, 0.05).finished();

  long tp = 0, tn = 0, fp = 0, fn = 0;
  for (Eigen::Index i = 0; i < test.n(); ++i) {
    const double score =
        test.points.row(i).dot(q.params.head(3)) + q.params(3);
    const bool predicted = score >= 0.0;
    const bool actual = test.label(i) > 0.0;
    if (predicted && actual) ++tp;
    if (predicted && !actual) ++fp;
    if (!predicted && actual) ++fn;
    if (!predicted && !actual) ++tn;
  }
  ClassificationMetrics cm = classification_metrics(test, q);
  CHECK(cm.confusion[1][1] == tp);
  CHECK(cm.confusion[0][1] == fp);
  CHECK(cm.confusion[1][0] == fn);
  CHECK(cm.confusion[0][0] == tn);
  CHECK(cm.accuracy ==
        doctest::Approx(static_cast<double>(tp + tn) / 500.0).epsilon(1e-15));
  CHECK(cm.accuracy ==
        doctest::Approx(static_cast<double>(cm.confusion[0][0] + cm.confusion[1][1]) /
                        500.0));
}

TEST_CASE("r_squared endpoints") {
  Eigen::MatrixXd pts(4, 1);
  pts << 0, 1, 2, 3;
  Eigen::VectorXd labels(4);
  labels << 1, 3, 5, 7;
  Dataset test = make_dataset(pts, labels);

  Query perfect;
  perfect.kind = Task::LinearRegression;
  perfect.params = (Eigen::VectorXd(2) << 2.0, 1.0).finished();
  CHECK(r_squared(test, perfect) == doctest::Approx(1.0).epsilon(1e-15));

  Query mean_only;
  mean_only.kind = Task::LinearRegression;
  mean_only.params = (Eigen::VectorXd(2) << 0.0, 4.0).finished();  // label mean
  CHECK(r_squared(test, mean_only) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("r_squared matches the direct formula on noisy linear data") {
  SyntheticSpec spec;
  spec.generator = "linear";
  spec.n = 300;
  spec.d = 3;
  spec.noise = 0.5;
  Dataset test = generate_synthetic(spec, 777);
  SolverConfig config;
  config.lambda = 0.0;
  Query fit = solve_weighted(Task::LinearRegression, test, identity_coreset(300),
                             config)
                  .query;

  double ss_res = 0.0;
  const double mean = test.labels->mean();
  double ss_tot = 0.0;
  for (Eigen::Index i = 0; i < 300; ++i) {
    const double pred = test.points.row(i).dot(fit.params.head(3)) + fit.params(3);
    ss_res += (pred - test.label(i)) * (pred - test.label(i));
    ss_tot += (test.label(i) - mean) * (test.label(i) - mean);
  }
  CHECK(r_squared(test, fit) ==
        doctest::Approx(1.0 - ss_res / ss_tot).epsilon(1e-9));
}

TEST_CASE("r_squared rejects zero label variance") {
  Eigen::MatrixXd pts(3, 1);
  pts << 0, 1, 2;
  Dataset test = make_dataset(pts, Eigen::VectorXd::Constant(3, 2.0));
  Query q;
  q.kind = Task::LinearRegression;
  q.params = (Eigen::VectorXd(2) << 0.0, 2.0).finished();
  CHECK_THROWS_AS(r_squared(test, q), std::invalid_argument);
}

TEST_CASE("classification metrics reject a regression query") {
  Eigen::MatrixXd pts(2, 1);
  pts << 0, 1;
  Eigen::VectorXd labels(2);
  labels << -1, 1;
  Dataset test = make_dataset(pts, labels);
  Query q;
  q.kind = Task::LinearRegression;
  q.params = (Eigen::VectorXd(2) << 1.0, 0.0).finished();
  CHECK_THROWS_AS(classification_metrics(test, q), std::invalid_argument);
}

TEST_CASE("mean and std aggregate exactly") {
  const std::vector<double> values{0.5, 1.5, 2.0, 4.0};
  double naive_mean = 0.0;
  for (double v : values) naive_mean += v;
  naive_mean /= 4.0;
  double naive_var = 0.0;
  for (double v : values) naive_var += (v - naive_mean) * (v - naive_mean);
  CHECK(mean_of(values) == doctest::Approx(naive_mean).epsilon(1e-12));
  CHECK(std_of(values) ==
        doctest::Approx(std::sqrt(naive_var / 4.0)).epsilon(1e-12));
}

TEST_CASE("train/test split is seeded, 80/20 and stratified") {
  SyntheticSpec spec;
  spec.generator = "blobs";
  spec.n = 200;
  spec.d = 2;
  spec.balance = 0.25;
  Dataset data = generate_synthetic(spec, 41);
  TrainTestSplit split = train_test_split(data, 0.2, 5, true);
  CHECK(split.train.n() + split.test.n() == 200);
  CHECK(split.test.n() == doctest::Approx(40).epsilon(0.1));

  auto positives = [](const Dataset& d) {
    long count = 0;
    for (Eigen::Index i = 0; i < d.n(); ++i)
      if (d.label(i) > 0) ++count;
    return count;
  };
  const double train_share =
      static_cast<double>(positives(split.train)) / static_cast<double>(split.train.n());
  const double test_share =
      static_cast<double>(positives(split.test)) / static_cast<double>(split.test.n());
  CHECK(std::abs(train_share - test_share) < 0.05);

  TrainTestSplit replay = train_test_split(data, 0.2, 5, true);
  CHECK(replay.test.points == split.test.points);
}

TEST_SUITE_END();
