#include "autocore/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "autocore/rng.hpp"

namespace autocore {

double approximation_error(const Dataset& data, const LossFunction& loss, Task task,
                           const Coreset& coreset, const SolverConfig& config,
                           const Query& full_solution) {
  SolverResult on_coreset = solve_weighted(task, data, coreset, config);
  const double coreset_total =
      eval_loss_column(loss, data, on_coreset.query).sum();
  const double full_total = eval_loss_column(loss, data, full_solution).sum();
  return std::abs(coreset_total - full_total);
}

double approximation_error(const Dataset& data, const LossFunction& loss, Task task,
                           const Coreset& coreset, const SolverConfig& config) {
  SolverResult on_full =
      solve_weighted(task, data, identity_coreset(data.n()), config);
  return approximation_error(data, loss, task, coreset, config, on_full.query);
}

ClassificationMetrics classification_metrics(const Dataset& test, const Query& query) {
  if (query.kind != Task::LogisticRegression && query.kind != Task::Svm)
    throw std::invalid_argument("classification metrics need a classification query");
  if (!test.has_labels())
    throw std::invalid_argument("classification metrics need a labeled test set");
  query.require_valid(test.dim());

  ClassificationMetrics out;
  const Eigen::Index d = test.dim();
  long correct = 0;
  for (Eigen::Index i = 0; i < test.n(); ++i) {
    const double score = test.points.row(i).dot(query.params.head(d)) + query.params(d);
    const int predicted = score >= 0.0 ? 1 : 0;  // sign zero predicts +1
    const int actual = test.label(i) > 0.0 ? 1 : 0;
    out.confusion[static_cast<std::size_t>(actual)][static_cast<std::size_t>(predicted)]++;
    if (predicted == actual) ++correct;
  }
  out.accuracy = static_cast<double>(correct) / static_cast<double>(test.n());
  return out;
}

double r_squared(const Dataset& test, const Query& query) {
  if (query.kind != Task::LinearRegression)
    throw std::invalid_argument("r_squared needs a regression query");
  if (!test.has_labels())
    throw std::invalid_argument("r_squared needs a labeled test set");
  query.require_valid(test.dim());

  const Eigen::VectorXd& y = *test.labels;
  const double mean = y.mean();
  const double ss_tot = (y.array() - mean).square().sum();
  if (ss_tot <= 0.0)
    throw std::invalid_argument("r_squared undefined for zero label variance");

  const Eigen::Index d = test.dim();
  double ss_res = 0.0;
  for (Eigen::Index i = 0; i < test.n(); ++i) {
    const double predicted =
        test.points.row(i).dot(query.params.head(d)) + query.params(d);
    const double r = predicted - y(i);
    ss_res += r * r;
  }
  return 1.0 - ss_res / ss_tot;
}

TrainTestSplit train_test_split(const Dataset& data, double test_fraction,
                                std::uint64_t seed, bool stratify) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw std::invalid_argument("test fraction must be in (0, 1)");

  std::vector<Index> test_rows;
  Rng rng(derive_seed(seed, "train-test-split"));

  auto shuffled = [&](std::vector<Index> rows) {
    std::shuffle(rows.begin(), rows.end(), rng);
    return rows;
  };
  auto take_test = [&](const std::vector<Index>& rows) {
    auto count = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(rows.size())));
    count = std::clamp<std::size_t>(count, 1, rows.size() - 1);
    test_rows.insert(test_rows.end(), rows.begin(),
                     rows.begin() + static_cast<std::ptrdiff_t>(count));
  };

  if (stratify && data.has_labels()) {
    std::vector<Index> neg, pos;
    for (Eigen::Index i = 0; i < data.n(); ++i)
      (data.label(i) < 0 ? neg : pos).push_back(i);
    if (!neg.empty()) take_test(shuffled(std::move(neg)));
    if (!pos.empty()) take_test(shuffled(std::move(pos)));
  } else {
    std::vector<Index> all(static_cast<std::size_t>(data.n()));
    std::iota(all.begin(), all.end(), Index{0});
    take_test(shuffled(std::move(all)));
  }
  std::sort(test_rows.begin(), test_rows.end());

  std::vector<bool> is_test(static_cast<std::size_t>(data.n()), false);
  for (Index i : test_rows) is_test[static_cast<std::size_t>(i)] = true;

  auto build = [&](bool pick_test) {
    std::vector<Index> rows;
    for (Eigen::Index i = 0; i < data.n(); ++i)
      if (is_test[static_cast<std::size_t>(i)] == pick_test) rows.push_back(i);
    Eigen::MatrixXd points(static_cast<Eigen::Index>(rows.size()), data.dim());
    std::optional<Eigen::VectorXd> labels;
    if (data.has_labels())
      labels = Eigen::VectorXd(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t j = 0; j < rows.size(); ++j) {
      points.row(static_cast<Eigen::Index>(j)) = data.points.row(rows[j]);
      if (labels) (*labels)(static_cast<Eigen::Index>(j)) = data.label(rows[j]);
    }
    return make_dataset(std::move(points), std::move(labels), data.name);
  };

  return TrainTestSplit{build(false), build(true)};
}

double mean_of(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

double std_of(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  const double mean = mean_of(values);
  double acc = 0.0;
  for (double v : values) acc += (v - mean) * (v - mean);
  return std::sqrt(acc / static_cast<double>(values.size()));
}

}  // namespace autocore
