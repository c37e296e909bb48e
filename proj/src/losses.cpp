#include "autocore/losses.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "autocore/rng.hpp"

namespace autocore {

double log1p_exp_neg(double t) {
  // ln(1 + exp(-t)) without overflow on either tail.
  if (t >= 0.0) return std::log1p(std::exp(-t));
  return -t + std::log1p(std::exp(t));
}

namespace {

double linear_margin(const Eigen::RowVectorXd& p, const Query& q) {
  const Eigen::Index d = p.size();
  return p.dot(q.params.head(d)) + q.params(d);
}

double linear_regression_loss(const Eigen::RowVectorXd& p, double y, const Query& q) {
  const double r = linear_margin(p, q) - y;
  return r * r;
}

double logistic_loss(const Eigen::RowVectorXd& p, double y, const Query& q) {
  return log1p_exp_neg(y * linear_margin(p, q));
}

double hinge_loss(const Eigen::RowVectorXd& p, double y, const Query& q) {
  return std::max(0.0, 1.0 - y * linear_margin(p, q));
}

double kmeans_loss(const Eigen::RowVectorXd& p, double /*y*/, const Query& q) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < q.centers.rows(); ++c)
    best = std::min(best, (p - q.centers.row(c)).squaredNorm());
  return best;
}

const LossFunction kLinear{Task::LinearRegression, "linear-regression",
                           linear_regression_loss};
const LossFunction kLogistic{Task::LogisticRegression, "logistic-regression",
                             logistic_loss};
const LossFunction kSvm{Task::Svm, "svm", hinge_loss};
const LossFunction kKmeans{Task::KMeans, "kmeans", kmeans_loss};

std::map<std::string, LossFunction>& registry() {
  static std::map<std::string, LossFunction> losses;
  return losses;
}

std::mutex registry_mutex;

}  // namespace

const LossFunction& builtin_loss(Task task) {
  switch (task) {
    case Task::LinearRegression: return kLinear;
    case Task::LogisticRegression: return kLogistic;
    case Task::Svm: return kSvm;
    case Task::KMeans: return kKmeans;
  }
  throw std::invalid_argument("unknown task");
}

double eval_loss(const LossFunction& loss, const Dataset& data, Eigen::Index i,
                 const Query& query) {
  query.require_valid(data.dim());
  if (query.kind != loss.kind)
    throw std::invalid_argument("query kind does not match loss kind");
  const double y = data.has_labels() ? data.label(i) : 0.0;
  return loss.eval(data.points.row(i), y, query);
}

Eigen::VectorXd eval_loss_column(const LossFunction& loss, const Dataset& data,
                                 const Query& query) {
  query.require_valid(data.dim());
  if (query.kind != loss.kind)
    throw std::invalid_argument("query kind does not match loss kind");
  Eigen::VectorXd column(data.n());
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    const double y = data.has_labels() ? data.label(i) : 0.0;
    const double v = loss.eval(data.points.row(i), y, query);
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("loss returned a negative or non-finite value "
                                  "at row " + std::to_string(i));
    column(i) = v;
  }
  return column;
}

Eigen::VectorXd multiplicative_transform(const Eigen::VectorXd& column) {
  const double total = column.sum();
  if (total <= 0.0) return Eigen::VectorXd::Zero(column.size());
  return column / std::sqrt(total);
}

namespace {

// 100 random (point, query) pairs across a few dimensions; every output must
// be finite and nonnegative.
void probe_loss(const LossFunction& loss) {
  Rng rng(derive_seed(0x10557, loss.name));
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  const Eigen::Index dims[] = {1, 2, 5, 8};
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index d = dims[trial % 4];
    Eigen::RowVectorXd p(d);
    for (Eigen::Index j = 0; j < d; ++j) p(j) = gauss(rng);
    const double y = loss.kind == Task::LinearRegression ? gauss(rng)
                                                         : (coin(rng) ? 1.0 : -1.0);
    Query q;
    q.kind = loss.kind;
    if (loss.kind == Task::KMeans) {
      q.centers.resize(2, d);
      for (Eigen::Index c = 0; c < 2; ++c)
        for (Eigen::Index j = 0; j < d; ++j) q.centers(c, j) = gauss(rng);
    } else {
      q.params.resize(d + 1);
      for (Eigen::Index j = 0; j <= d; ++j) q.params(j) = gauss(rng);
    }
    const double v = loss.eval(p, y, q);
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("loss '" + loss.name +
                                  "' failed the nonnegativity probe");
  }
}

}  // namespace

void register_loss(const LossFunction& loss) {
  if (loss.name.empty() || !loss.eval)
    throw std::invalid_argument("loss needs a name and an evaluation rule");
  probe_loss(loss);
  std::lock_guard<std::mutex> lock(registry_mutex);
  registry()[loss.name] = loss;
}

bool has_registered_loss(const std::string& name) {
  std::lock_guard<std::mutex> lock(registry_mutex);
  return registry().count(name) > 0;
}

const LossFunction& registered_loss(const std::string& name) {
  std::lock_guard<std::mutex> lock(registry_mutex);
  auto it = registry().find(name);
  if (it == registry().end())
    throw std::invalid_argument("no registered loss named '" + name + "'");
  return it->second;
}

}  // namespace autocore
