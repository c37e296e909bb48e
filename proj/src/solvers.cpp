#include "autocore/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "autocore/losses.hpp"
#include "autocore/rng.hpp"

namespace autocore {

namespace {

struct WeightedView {
  Eigen::MatrixXd points;  // s x d
  Eigen::VectorXd labels;  // s (zeros when absent)
  Eigen::VectorXd weights; // s
};

WeightedView gather(const Dataset& data, const Coreset& coreset) {
  const auto s = static_cast<Eigen::Index>(coreset.indices.size());
  WeightedView view;
  view.points.resize(s, data.dim());
  view.labels = Eigen::VectorXd::Zero(s);
  view.weights.resize(s);
  for (Eigen::Index j = 0; j < s; ++j) {
    const Index i = coreset.indices[static_cast<std::size_t>(j)];
    view.points.row(j) = data.points.row(i);
    if (data.has_labels()) view.labels(j) = data.label(i);
    view.weights(j) = coreset.weights[static_cast<std::size_t>(j)];
  }
  return view;
}

double margin(const Eigen::MatrixXd& points, const Eigen::VectorXd& theta,
              Eigen::Index row) {
  const Eigen::Index d = points.cols();
  return points.row(row).dot(theta.head(d)) + theta(d);
}

// -- linear regression ------------------------------------------------------

SolverResult solve_linear(const WeightedView& view, const SolverConfig& config) {
  const Eigen::Index s = view.points.rows();
  const Eigen::Index d = view.points.cols();
  Eigen::MatrixXd design(s, d + 1);
  design.leftCols(d) = view.points;
  design.col(d).setOnes();

  Eigen::MatrixXd gram =
      design.transpose() * view.weights.asDiagonal() * design;
  Eigen::VectorXd rhs =
      design.transpose() * (view.weights.asDiagonal() * view.labels);
  Eigen::MatrixXd reg = Eigen::MatrixXd::Identity(d + 1, d + 1);
  reg(d, d) = 0.0;  // intercept stays unpenalized
  gram += config.lambda * reg;

  Eigen::VectorXd theta = gram.ldlt().solve(rhs);
  bool jittered = false;
  const double residual = (gram * theta - rhs).norm();
  if (!theta.allFinite() || residual > 1e-8 * (rhs.norm() + 1.0)) {
    gram += 1e-10 * reg;
    gram(d, d) += 1e-10;
    theta = gram.ldlt().solve(rhs);
    jittered = true;
  }

  SolverResult result;
  result.query.kind = Task::LinearRegression;
  result.query.params = theta;
  result.jittered = jittered;
  result.converged = true;
  double obj = 0.0;
  for (Eigen::Index i = 0; i < s; ++i) {
    const double r = margin(view.points, theta, i) - view.labels(i);
    obj += view.weights(i) * r * r;
  }
  result.objective = obj + config.lambda * theta.head(d).squaredNorm();
  return result;
}

// -- logistic regression ----------------------------------------------------

double logistic_objective(const WeightedView& view, const Eigen::VectorXd& theta,
                          double lambda) {
  const Eigen::Index d = view.points.cols();
  double obj = lambda * theta.head(d).squaredNorm();
  for (Eigen::Index i = 0; i < view.points.rows(); ++i)
    obj += view.weights(i) * log1p_exp_neg(view.labels(i) * margin(view.points, theta, i));
  return obj;
}

Eigen::VectorXd logistic_gradient(const WeightedView& view,
                                  const Eigen::VectorXd& theta, double lambda) {
  const Eigen::Index d = view.points.cols();
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(d + 1);
  grad.head(d) = 2.0 * lambda * theta.head(d);
  for (Eigen::Index i = 0; i < view.points.rows(); ++i) {
    const double t = view.labels(i) * margin(view.points, theta, i);
    // d/dt ln(1+e^-t) = -1/(1+e^t)
    const double sig = t >= 0.0 ? std::exp(-t) / (1.0 + std::exp(-t))
                                : 1.0 / (1.0 + std::exp(t));
    const double coef = -view.weights(i) * sig * view.labels(i);
    grad.head(d) += coef * view.points.row(i).transpose();
    grad(d) += coef;
  }
  return grad;
}

SolverResult solve_logistic(const WeightedView& view, const SolverConfig& config) {
  const Eigen::Index d = view.points.cols();
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d + 1);
  double obj = logistic_objective(view, theta, config.lambda);
  const double grad_tol =
      config.tolerance * std::max(1.0, view.weights.sum());

  bool converged = false;
  double step = config.step_size;
  for (int iter = 0; iter < config.max_iterations; ++iter) {
    const Eigen::VectorXd grad = logistic_gradient(view, theta, config.lambda);
    const double gnorm2 = grad.squaredNorm();
    if (std::sqrt(gnorm2) <= grad_tol) {
      converged = true;
      break;
    }
    step = std::min(config.step_size, step * 4.0);
    bool accepted = false;
    while (step > 1e-18) {
      const Eigen::VectorXd trial = theta - step * grad;
      const double trial_obj = logistic_objective(view, trial, config.lambda);
      if (trial_obj <= obj - 1e-4 * step * gnorm2) {
        theta = trial;
        obj = trial_obj;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no descent step at machine scale
  }

  SolverResult result;
  result.query.kind = Task::LogisticRegression;
  result.query.params = theta;
  result.objective = obj;
  result.converged = converged;
  return result;
}

// -- SVM (hinge, Pegasos-style schedule) -------------------------------------

double svm_objective(const WeightedView& view, const Eigen::VectorXd& theta,
                     double lambda) {
  const Eigen::Index d = view.points.cols();
  double obj = lambda * theta.head(d).squaredNorm();
  for (Eigen::Index i = 0; i < view.points.rows(); ++i)
    obj += view.weights(i) *
           std::max(0.0, 1.0 - view.labels(i) * margin(view.points, theta, i));
  return obj;
}

SolverResult solve_svm(const WeightedView& view, const SolverConfig& config) {
  const Eigen::Index d = view.points.cols();
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d + 1);

  Eigen::VectorXd best_theta = theta;
  double best_obj = svm_objective(view, theta, config.lambda);
  double best_at_half = best_obj;

  for (int t = 1; t <= config.max_iterations; ++t) {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(d + 1);
    grad.head(d) = 2.0 * config.lambda * theta.head(d);
    for (Eigen::Index i = 0; i < view.points.rows(); ++i) {
      if (view.labels(i) * margin(view.points, theta, i) < 1.0) {
        grad.head(d) -= view.weights(i) * view.labels(i) * view.points.row(i).transpose();
        grad(d) -= view.weights(i) * view.labels(i);
      }
    }
    const double step = config.lambda > 0.0
                            ? 1.0 / (config.lambda * static_cast<double>(t))
                            : config.step_size / std::sqrt(static_cast<double>(t));
    theta -= step * grad;
    const double obj = svm_objective(view, theta, config.lambda);
    if (obj < best_obj) {
      best_obj = obj;
      best_theta = theta;
    }
    if (t == config.max_iterations / 2) best_at_half = best_obj;
  }

  SolverResult result;
  result.query.kind = Task::Svm;
  result.query.params = best_theta;
  result.objective = best_obj;
  result.converged =
      best_at_half - best_obj <= 1e-6 * (1.0 + std::abs(best_obj));
  return result;
}

// -- weighted k-means --------------------------------------------------------

Eigen::Index pick_from_cdf(const Eigen::VectorXd& mass, double u) {
  const double total = mass.sum();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < mass.size(); ++i) {
    acc += mass(i) / total;
    if (u < acc) return i;
  }
  return mass.size() - 1;
}

Eigen::MatrixXd kmeans_pp_init(const WeightedView& view, int k, Rng& rng) {
  const Eigen::Index s = view.points.rows();
  const Eigen::Index d = view.points.cols();
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Eigen::MatrixXd centers(k, d);
  centers.row(0) = view.points.row(pick_from_cdf(view.weights, unif(rng)));
  Eigen::VectorXd dist(s);
  for (Eigen::Index i = 0; i < s; ++i)
    dist(i) = (view.points.row(i) - centers.row(0)).squaredNorm();

  for (int c = 1; c < k; ++c) {
    Eigen::VectorXd mass = view.weights.cwiseProduct(dist);
    Eigen::Index pick;
    if (mass.sum() > 0.0) {
      pick = pick_from_cdf(mass, unif(rng));
    } else {
      pick = static_cast<Eigen::Index>(c) % s;  // everything coincides
    }
    centers.row(c) = view.points.row(pick);
    for (Eigen::Index i = 0; i < s; ++i)
      dist(i) = std::min(dist(i), (view.points.row(i) - centers.row(c)).squaredNorm());
  }
  return centers;
}

SolverResult solve_kmeans(const WeightedView& view, const SolverConfig& config) {
  const Eigen::Index s = view.points.rows();
  const Eigen::Index d = view.points.cols();
  const int k = std::max(1, config.k);

  Rng rng(derive_seed(config.seed, "kmeans-init"));
  Eigen::MatrixXd centers = kmeans_pp_init(view, k, rng);

  std::vector<int> assign(static_cast<std::size_t>(s), -1);
  bool converged = false;
  double cost = 0.0;
  for (int iter = 0; iter < config.max_iterations; ++iter) {
    bool changed = false;
    cost = 0.0;
    for (Eigen::Index i = 0; i < s; ++i) {
      int best = 0;
      double best_dist = (view.points.row(i) - centers.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double dist = (view.points.row(i) - centers.row(c)).squaredNorm();
        if (dist < best_dist) {  // ties keep the lowest center index
          best_dist = dist;
          best = c;
        }
      }
      cost += view.weights(i) * best_dist;
      if (assign[static_cast<std::size_t>(i)] != best) {
        assign[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    if (!changed) {
      converged = true;
      break;
    }
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, d);
    Eigen::VectorXd mass = Eigen::VectorXd::Zero(k);
    for (Eigen::Index i = 0; i < s; ++i) {
      const int c = assign[static_cast<std::size_t>(i)];
      sums.row(c) += view.weights(i) * view.points.row(i);
      mass(c) += view.weights(i);
    }
    for (int c = 0; c < k; ++c) {
      if (mass(c) > 0.0) centers.row(c) = sums.row(c) / mass(c);
      // a cluster that lost all its mass keeps its previous center
    }
  }

  SolverResult result;
  result.query.kind = Task::KMeans;
  result.query.centers = centers;
  result.objective = cost;
  result.converged = converged;
  return result;
}

}  // namespace

double weighted_objective(Task task, const Dataset& data, const Coreset& coreset,
                          const SolverConfig& config, const Query& query) {
  const LossFunction& loss = builtin_loss(task);
  double obj = 0.0;
  for (std::size_t j = 0; j < coreset.indices.size(); ++j)
    obj += coreset.weights[j] * eval_loss(loss, data, coreset.indices[j], query);
  if (task != Task::KMeans)
    obj += config.lambda * query.params.head(data.dim()).squaredNorm();
  return obj;
}

SolverResult solve_weighted(Task task, const Dataset& data, const Coreset& coreset,
                            const SolverConfig& config) {
  require_valid_for_task(data, task);
  require_valid_coreset(coreset, data.n());
  if (coreset.indices.empty())
    throw std::invalid_argument("cannot solve on an empty coreset");
  double total = 0.0;
  for (double w : coreset.weights) total += w;
  if (total <= 0.0)
    throw std::invalid_argument("coreset weights are all zero");

  const WeightedView view = gather(data, coreset);
  switch (task) {
    case Task::LinearRegression: return solve_linear(view, config);
    case Task::LogisticRegression: return solve_logistic(view, config);
    case Task::Svm: return solve_svm(view, config);
    case Task::KMeans: return solve_kmeans(view, config);
  }
  throw std::invalid_argument("unknown task");
}

namespace {

std::vector<Index> sample_without_replacement(Eigen::Index n, Eigen::Index count,
                                              Rng& rng) {
  std::vector<Index> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), Index{0});
  for (Eigen::Index k = 0; k < count; ++k) {
    std::uniform_int_distribution<Eigen::Index> pick(k, n - 1);
    std::swap(pool[static_cast<std::size_t>(k)],
              pool[static_cast<std::size_t>(pick(rng))]);
  }
  pool.resize(static_cast<std::size_t>(count));
  return pool;
}

// Class-stratified subset: every class keeps at least ceil(size / (2*classes))
// samples, remaining quota split proportionally.
std::vector<Index> stratified_subset(const Dataset& data, Eigen::Index size,
                                     Rng& rng) {
  std::vector<Index> neg, pos;
  for (Eigen::Index i = 0; i < data.n(); ++i)
    (data.label(i) < 0 ? neg : pos).push_back(i);
  if (neg.empty() || pos.empty()) {
    auto all = sample_without_replacement(data.n(), std::min(size, data.n()), rng);
    std::sort(all.begin(), all.end());
    return all;
  }

  const Eigen::Index floor_quota = (size + 3) / 4;  // ceil(size / (2*2))
  const double share_neg =
      static_cast<double>(neg.size()) / static_cast<double>(data.n());
  Eigen::Index quota_neg = std::max<Eigen::Index>(
      floor_quota, static_cast<Eigen::Index>(std::llround(share_neg * static_cast<double>(size))));
  quota_neg = std::min<Eigen::Index>(quota_neg, static_cast<Eigen::Index>(neg.size()));
  Eigen::Index quota_pos = std::min<Eigen::Index>(
      size - quota_neg, static_cast<Eigen::Index>(pos.size()));
  quota_pos = std::max<Eigen::Index>(
      quota_pos, std::min<Eigen::Index>(floor_quota,
                                        static_cast<Eigen::Index>(pos.size())));

  std::vector<Index> subset;
  auto take = [&](const std::vector<Index>& from, Eigen::Index count) {
    auto local = sample_without_replacement(static_cast<Eigen::Index>(from.size()),
                                            count, rng);
    for (Index j : local) subset.push_back(from[static_cast<std::size_t>(j)]);
  };
  take(neg, quota_neg);
  take(pos, quota_pos);
  std::sort(subset.begin(), subset.end());
  return subset;
}

Query random_query(Task task, Eigen::Index d, int k, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Query q;
  q.kind = task;
  if (task == Task::KMeans) {
    q.centers.resize(std::max(1, k), d);
    for (Eigen::Index r = 0; r < q.centers.rows(); ++r)
      for (Eigen::Index c = 0; c < d; ++c) q.centers(r, c) = gauss(rng);
  } else {
    q.params.resize(d + 1);
    for (Eigen::Index j = 0; j <= d; ++j) q.params(j) = gauss(rng);
  }
  return q;
}

}  // namespace

std::vector<Query> initial_solutions(Task task, const Dataset& data, int m,
                                     const SolverConfig& config,
                                     std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("initial_solutions needs m >= 1");
  require_valid_for_task(data, task);

  const Eigen::Index subset_size = std::min<Eigen::Index>(
      data.n(),
      std::max<Eigen::Index>(config.initial_subset_floor, 10 * data.dim()));

  std::vector<Query> out;
  out.reserve(static_cast<std::size_t>(m));
  for (int slot = 0; slot < m; ++slot) {
    const std::uint64_t slot_seed =
        derive_seed(seed, "init-slot", static_cast<std::uint64_t>(slot));
    Rng rng(slot_seed);
    try {
      std::vector<Index> rows =
          task_is_classification(task) && data.has_labels()
              ? stratified_subset(data, subset_size, rng)
              : [&] {
                  auto s = sample_without_replacement(data.n(), subset_size, rng);
                  std::sort(s.begin(), s.end());
                  return s;
                }();

      Eigen::MatrixXd points(static_cast<Eigen::Index>(rows.size()), data.dim());
      std::optional<Eigen::VectorXd> labels;
      if (data.has_labels()) labels = Eigen::VectorXd(static_cast<Eigen::Index>(rows.size()));
      for (std::size_t j = 0; j < rows.size(); ++j) {
        points.row(static_cast<Eigen::Index>(j)) = data.points.row(rows[j]);
        if (labels) (*labels)(static_cast<Eigen::Index>(j)) = data.label(rows[j]);
      }
      Dataset sub = make_dataset(std::move(points), std::move(labels), data.name);

      SolverConfig sub_config = config;
      sub_config.seed = slot_seed;
      SolverResult solved = solve_weighted(
          task, sub, identity_coreset(sub.n(), "init-subset"), sub_config);
      out.push_back(std::move(solved.query));
    } catch (const std::exception&) {
      Rng fallback(derive_seed(slot_seed, "fallback"));
      out.push_back(random_query(task, data.dim(), config.k, fallback));
    }
  }
  return out;
}

}  // namespace autocore
