#include "autocore/types.hpp"

#include <cmath>
#include <unordered_set>

namespace autocore {

std::string task_name(Task task) {
  switch (task) {
    case Task::LinearRegression: return "linear-regression";
    case Task::LogisticRegression: return "logistic-regression";
    case Task::Svm: return "svm";
    case Task::KMeans: return "kmeans";
  }
  throw std::invalid_argument("unknown task");
}

Task task_from_name(const std::string& name) {
  if (name == "linear-regression" || name == "linear") return Task::LinearRegression;
  if (name == "logistic-regression" || name == "logistic") return Task::LogisticRegression;
  if (name == "svm") return Task::Svm;
  if (name == "kmeans" || name == "k-means") return Task::KMeans;
  throw std::invalid_argument("unknown task name: " + name);
}

bool task_needs_labels(Task task) { return task != Task::KMeans; }

bool task_is_classification(Task task) {
  return task == Task::LogisticRegression || task == Task::Svm;
}

bool Query::valid_for_dim(Eigen::Index d) const {
  if (kind == Task::KMeans) {
    return centers.rows() >= 1 && centers.cols() == d && centers.allFinite();
  }
  return params.size() == d + 1 && params.allFinite();
}

void Query::require_valid(Eigen::Index d) const {
  if (!valid_for_dim(d)) {
    throw std::invalid_argument("query invalid for task " + task_name(kind) +
                                " with dimension " + std::to_string(d));
  }
}

double query_distance(const Query& a, const Query& b) {
  if (a.kind != b.kind) return std::numeric_limits<double>::infinity();
  if (a.kind == Task::KMeans) {
    if (a.centers.rows() != b.centers.rows() || a.centers.cols() != b.centers.cols())
      return std::numeric_limits<double>::infinity();
    return (a.centers - b.centers).norm();
  }
  if (a.params.size() != b.params.size())
    return std::numeric_limits<double>::infinity();
  return (a.params - b.params).norm();
}

Dataset make_dataset(Eigen::MatrixXd points, std::optional<Eigen::VectorXd> labels,
                     std::string name) {
  if (points.rows() < 1 || points.cols() < 1)
    throw std::invalid_argument("dataset needs n >= 1 and d >= 1");
  if (!points.allFinite())
    throw std::invalid_argument("dataset contains a non-finite feature");
  if (labels && labels->size() != points.rows())
    throw std::invalid_argument("label count does not match point count");
  if (labels && !labels->allFinite())
    throw std::invalid_argument("dataset contains a non-finite label");
  return Dataset{std::move(points), std::move(labels), std::move(name)};
}

void require_valid_for_task(const Dataset& data, Task task) {
  if (!task_needs_labels(task)) return;
  if (!data.has_labels())
    throw std::invalid_argument(task_name(task) + " requires labels");
  if (task_is_classification(task)) {
    for (Eigen::Index i = 0; i < data.n(); ++i) {
      const double y = data.label(i);
      if (y != 1.0 && y != -1.0)
        throw std::invalid_argument("classification labels must be in {-1,+1}; row " +
                                    std::to_string(i));
    }
  }
}

Coreset identity_coreset(Index n, const std::string& source) {
  Coreset cs;
  cs.indices.resize(static_cast<std::size_t>(n));
  cs.weights.assign(static_cast<std::size_t>(n), 1.0);
  for (Index i = 0; i < n; ++i) cs.indices[static_cast<std::size_t>(i)] = i;
  cs.source = source;
  return cs;
}

void require_valid_coreset(const Coreset& cs, Index n) {
  if (cs.indices.size() != cs.weights.size())
    throw std::invalid_argument("coreset index/weight size mismatch");
  std::unordered_set<Index> seen;
  for (std::size_t j = 0; j < cs.indices.size(); ++j) {
    const Index i = cs.indices[j];
    if (i < 0 || i >= n)
      throw std::invalid_argument("coreset index out of range: " + std::to_string(i));
    if (!seen.insert(i).second)
      throw std::invalid_argument("duplicate coreset index: " + std::to_string(i));
    const double w = cs.weights[j];
    if (!(w >= 0.0) || !std::isfinite(w))
      throw std::invalid_argument("coreset weight must be finite and >= 0");
  }
}

ConvexWeights make_convex_weights(std::vector<double> alpha) {
  double total = 0.0;
  for (double a : alpha) {
    if (!(a >= 0.0) || !std::isfinite(a))
      throw std::invalid_argument("convex weights must be finite and >= 0");
    total += a;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("convex weights must sum to 1");
  return ConvexWeights{std::move(alpha)};
}

}  // namespace autocore
