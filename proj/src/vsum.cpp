#include "autocore/vsum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "autocore/rng.hpp"

namespace autocore {

std::string backend_name(VsumBackend backend) {
  switch (backend) {
    case VsumBackend::Caratheodory: return "caratheodory";
    case VsumBackend::FrankWolfe: return "frank_wolfe";
    case VsumBackend::MedianOfMeans: return "median_of_means";
    case VsumBackend::Sensitivity: return "sensitivity";
    case VsumBackend::Uniform: return "uniform";
  }
  throw std::invalid_argument("unknown backend");
}

VsumBackend backend_from_name(const std::string& name) {
  if (name == "caratheodory") return VsumBackend::Caratheodory;
  if (name == "frank_wolfe" || name == "frank-wolfe") return VsumBackend::FrankWolfe;
  if (name == "median_of_means" || name == "median-of-means")
    return VsumBackend::MedianOfMeans;
  if (name == "sensitivity") return VsumBackend::Sensitivity;
  if (name == "uniform") return VsumBackend::Uniform;
  throw std::invalid_argument("unknown backend name: " + name);
}

double vsum_error(const LossMatrix& matrix, const Coreset& coreset) {
  require_valid_coreset(coreset, matrix.rows());
  Eigen::RowVectorXd target = matrix.entries.colwise().sum();
  Eigen::RowVectorXd approx = Eigen::RowVectorXd::Zero(matrix.cols());
  for (std::size_t j = 0; j < coreset.indices.size(); ++j)
    approx += coreset.weights[j] * matrix.entries.row(coreset.indices[j]);
  return (target - approx).squaredNorm();
}

namespace {

void sort_by_index(Coreset& cs) {
  std::vector<std::size_t> order(cs.indices.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return cs.indices[a] < cs.indices[b]; });
  std::vector<Index> idx(cs.indices.size());
  std::vector<double> w(cs.weights.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    idx[k] = cs.indices[order[k]];
    w[k] = cs.weights[order[k]];
  }
  cs.indices = std::move(idx);
  cs.weights = std::move(w);
}

// -------------------------------------------------------------------------
// Caratheodory elimination.
//
// Rows are lifted to [u_i; c] so the weight-sum constraint rides along with
// the column sums. Points stream in with weight 1 against an active set of
// at most z+1 linearly independent lifted vectors; each dependence found
// shifts weight along the dependence direction until some weight reaches
// zero (classic elimination, one point retired per step). The active basis
// keeps an explicit inverse, updated in O(D^2) per basis exchange and
// refactored periodically to bound drift.

struct CaraState {
  Eigen::Index dim = 0;  // lifted dimension D = z + 1
  double lift = 1.0;
  Eigen::MatrixXd basis;       // D x D, first q columns valid
  Eigen::MatrixXd basis_inv;   // valid once q == D
  Eigen::Index q = 0;
  bool inverse_mode = false;
  std::vector<Index> active;   // original row ids per basis column
  std::vector<double> weight;  // aligned with active
  int exchanges_since_refactor = 0;
};

struct CaraFailure {};

void cara_refactor(CaraState& st) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(st.basis);
  if (!lu.isInvertible()) throw CaraFailure{};
  st.basis_inv = lu.inverse();
  st.exchanges_since_refactor = 0;
}

void cara_process(CaraState& st, const Eigen::VectorXd& lifted, Index row) {
  constexpr double kPivotTol = 1e-8;
  constexpr int kRefactorEvery = 128;

  if (!st.inverse_mode) {
    Eigen::VectorXd lambda;
    double residual = lifted.norm();
    if (st.q > 0) {
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(st.basis.leftCols(st.q));
      lambda = qr.solve(lifted);
      residual = (st.basis.leftCols(st.q) * lambda - lifted).norm();
    }
    if (residual > 1e-9 * (lifted.norm() + st.lift)) {
      st.basis.col(st.q) = lifted;
      st.active.push_back(row);
      st.weight.push_back(1.0);
      ++st.q;
      if (st.q == st.dim) {
        cara_refactor(st);
        st.inverse_mode = true;
      }
      return;
    }
    // dependent on the current basis: eliminate below
    double gamma = 1.0;
    Eigen::Index leave = -1;
    for (Eigen::Index a = 0; a < st.q; ++a) {
      if (lambda(a) < -kPivotTol * 1e-4) {
        const double ratio = st.weight[static_cast<std::size_t>(a)] / (-lambda(a));
        if (ratio < gamma ||
            (ratio == gamma && leave >= 0 &&
             st.active[static_cast<std::size_t>(a)] <
                 st.active[static_cast<std::size_t>(leave)])) {
          gamma = ratio;
          leave = a;
        }
      }
    }
    for (Eigen::Index a = 0; a < st.q; ++a) {
      double& w = st.weight[static_cast<std::size_t>(a)];
      w += gamma * lambda(a);
      if (w < 0.0) w = 0.0;
    }
    if (leave >= 0 && gamma < 1.0) {
      st.basis.col(leave) = lifted;
      st.active[static_cast<std::size_t>(leave)] = row;
      st.weight[static_cast<std::size_t>(leave)] = 1.0 - gamma;
    }
    return;
  }

  Eigen::VectorXd lambda = st.basis_inv * lifted;
  double gamma = 1.0;
  Eigen::Index leave = -1;
  for (Eigen::Index a = 0; a < st.dim; ++a) {
    if (lambda(a) < 0.0) {
      const double ratio = st.weight[static_cast<std::size_t>(a)] / (-lambda(a));
      if (ratio < gamma ||
          (ratio == gamma && leave >= 0 &&
           st.active[static_cast<std::size_t>(a)] <
               st.active[static_cast<std::size_t>(leave)])) {
        gamma = ratio;
        leave = a;
      }
    }
  }
  for (Eigen::Index a = 0; a < st.dim; ++a) {
    double& w = st.weight[static_cast<std::size_t>(a)];
    w += gamma * lambda(a);
    if (w < 0.0) w = 0.0;
  }
  if (leave < 0 || gamma >= 1.0) return;  // newcomer fully absorbed

  st.basis.col(leave) = lifted;
  st.active[static_cast<std::size_t>(leave)] = row;
  st.weight[static_cast<std::size_t>(leave)] = 1.0 - gamma;
  ++st.exchanges_since_refactor;
  const double pivot = lambda(leave);
  if (std::abs(pivot) < kPivotTol ||
      st.exchanges_since_refactor >= kRefactorEvery) {
    cara_refactor(st);
    return;
  }
  // rank-one basis-inverse update for the replaced column
  Eigen::RowVectorXd pivot_row = st.basis_inv.row(leave) / pivot;
  for (Eigen::Index r = 0; r < st.dim; ++r) {
    if (r == leave) continue;
    st.basis_inv.row(r) -= lambda(r) * pivot_row;
  }
  st.basis_inv.row(leave) = pivot_row;
}

Coreset cara_attempt(const LossMatrix& matrix, const std::vector<Index>& order) {
  const Eigen::Index n = matrix.rows();
  const Eigen::Index z = matrix.cols();
  const Eigen::Index dim = z + 1;

  double mean_norm = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) mean_norm += matrix.entries.row(i).norm();
  mean_norm /= static_cast<double>(n);
  const double lift = std::max(1.0, mean_norm);

  CaraState st;
  st.dim = dim;
  st.lift = lift;
  st.basis.setZero(dim, dim);

  Eigen::VectorXd lifted(dim);
  std::size_t processed = 0;
  try {
    for (Index row : order) {
      lifted.head(z) = matrix.entries.row(row).transpose();
      lifted(z) = lift;
      cara_process(st, lifted, row);
      ++processed;
    }
  } catch (const CaraFailure&) {
    // rank degeneracy at roundoff: hand back active set + untouched tail
    // (the row being processed may already sit in the active set)
    Coreset cs;
    std::unordered_set<Index> in_active;
    for (std::size_t a = 0; a < st.active.size(); ++a) {
      cs.indices.push_back(st.active[a]);
      cs.weights.push_back(st.weight[a]);
      in_active.insert(st.active[a]);
    }
    for (std::size_t k = processed; k < order.size(); ++k) {
      if (in_active.count(order[k])) continue;
      cs.indices.push_back(order[k]);
      cs.weights.push_back(1.0);
    }
    cs.degenerate = true;
    sort_by_index(cs);
    return cs;
  }

  Coreset cs;
  for (std::size_t a = 0; a < st.active.size(); ++a) {
    if (st.weight[a] > 0.0) {
      cs.indices.push_back(st.active[a]);
      cs.weights.push_back(st.weight[a]);
    }
  }
  sort_by_index(cs);
  return cs;
}

}  // namespace

Coreset caratheodory(const LossMatrix& matrix, std::uint64_t seed) {
  const Eigen::Index n = matrix.rows();
  const double target_scale =
      1.0 + matrix.entries.colwise().sum().squaredNorm();
  const double bound = 1e-9 * target_scale;

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});

  Coreset cs = cara_attempt(matrix, order);
  cs.source = "caratheodory";
  cs.vsum_error = vsum_error(matrix, cs);
  if (!cs.degenerate && cs.vsum_error <= bound) return cs;

  // retry once on a seeded permutation
  Rng rng(derive_seed(seed, "caratheodory-retry"));
  std::shuffle(order.begin(), order.end(), rng);
  Coreset retry = cara_attempt(matrix, order);
  retry.source = "caratheodory";
  retry.vsum_error = vsum_error(matrix, retry);
  if (!retry.degenerate && retry.vsum_error <= bound) return retry;

  Coreset& best = retry.vsum_error < cs.vsum_error ? retry : cs;
  best.degenerate = true;
  return best;
}

Coreset frank_wolfe(const LossMatrix& matrix, Eigen::Index tau, std::uint64_t /*seed*/) {
  if (tau < 1) throw std::invalid_argument("frank_wolfe needs tau >= 1");
  const Eigen::Index n = matrix.rows();
  const Eigen::VectorXd mu = matrix.entries.colwise().mean().transpose();

  Eigen::Index start = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = (matrix.entries.row(i).transpose() - mu).squaredNorm();
    if (d < best_dist) {
      best_dist = d;
      start = i;
    }
  }

  Eigen::VectorXd weights = Eigen::VectorXd::Zero(n);
  weights(start) = 1.0;
  Eigen::VectorXd x = matrix.entries.row(start).transpose();

  Eigen::VectorXd best_weights = weights;
  double best_err = (x - mu).squaredNorm();

  for (Eigen::Index step = 1; step < tau; ++step) {
    const Eigen::VectorXd direction = mu - x;
    Eigen::Index pick = 0;
    double best_align = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double a = matrix.entries.row(i) * direction;
      if (a > best_align) {
        best_align = a;
        pick = i;
      }
    }
    const double gamma = 2.0 / (static_cast<double>(step) + 2.0);
    x = (1.0 - gamma) * x + gamma * matrix.entries.row(pick).transpose();
    weights *= (1.0 - gamma);
    weights(pick) += gamma;
    const double err = (x - mu).squaredNorm();
    if (err < best_err) {
      best_err = err;
      best_weights = weights;
    }
  }

  Coreset cs;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (best_weights(i) > 0.0) {
      cs.indices.push_back(i);
      cs.weights.push_back(best_weights(i) * static_cast<double>(n));
    }
  }
  cs.source = "frank_wolfe";
  cs.vsum_error = vsum_error(matrix, cs);
  return cs;
}

Coreset median_of_means(const LossMatrix& matrix, Eigen::Index tau, double delta,
                        std::uint64_t seed, MedianOfMeansDetail* detail) {
  const Eigen::Index n = matrix.rows();
  if (tau < 1 || tau > n)
    throw std::invalid_argument("median_of_means needs 1 <= tau <= n");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("median_of_means needs 0 < delta < 1");

  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  Rng rng(derive_seed(seed, "median_of_means"));
  std::shuffle(perm.begin(), perm.end(), rng);

  const Eigen::Index buckets = (n + tau - 1) / tau;
  const Eigen::Index base = n / buckets;
  const Eigen::Index extra = n % buckets;

  std::vector<std::vector<Index>> members(static_cast<std::size_t>(buckets));
  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(buckets, matrix.cols());
  std::size_t cursor = 0;
  for (Eigen::Index b = 0; b < buckets; ++b) {
    const Eigen::Index size = base + (b < extra ? 1 : 0);
    auto& list = members[static_cast<std::size_t>(b)];
    list.reserve(static_cast<std::size_t>(size));
    for (Eigen::Index k = 0; k < size; ++k) {
      const Index row = perm[cursor++];
      list.push_back(row);
      means.row(b) += matrix.entries.row(row);
    }
    means.row(b) /= static_cast<double>(size);
  }

  // Weiszfeld iteration for the geometric median of the bucket means.
  Eigen::RowVectorXd median = means.colwise().mean();
  const double scale = 1.0 + means.rowwise().norm().mean();
  for (int iter = 0; iter < 200; ++iter) {
    Eigen::RowVectorXd next = Eigen::RowVectorXd::Zero(matrix.cols());
    double total = 0.0;
    bool on_mean = false;
    for (Eigen::Index b = 0; b < buckets; ++b) {
      const double dist = (means.row(b) - median).norm();
      if (dist < 1e-12 * scale) {
        median = means.row(b);
        on_mean = true;
        break;
      }
      const double inv = 1.0 / dist;
      next += inv * means.row(b);
      total += inv;
    }
    if (on_mean) break;
    next /= total;
    const double moved = (next - median).norm();
    median = next;
    if (moved <= 1e-12 * scale) break;
  }

  Eigen::Index chosen = 0;
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index b = 0; b < buckets; ++b) {
    const double dist = (means.row(b) - median).squaredNorm();
    if (dist < best) {
      best = dist;
      chosen = b;
    }
  }

  if (detail) {
    detail->buckets = members;
    detail->bucket_means = means;
    detail->geometric_median = median;
    detail->chosen = chosen;
  }

  const auto& list = members[static_cast<std::size_t>(chosen)];
  const double weight = static_cast<double>(n) / static_cast<double>(list.size());
  Coreset cs;
  for (Index row : list) {
    cs.indices.push_back(row);
    cs.weights.push_back(weight);
  }
  cs.source = "median_of_means";
  sort_by_index(cs);
  cs.vsum_error = vsum_error(matrix, cs);
  return cs;
}

Sensitivities one_mean_sensitivities(const LossMatrix& matrix) {
  const Eigen::Index n = matrix.rows();
  const Eigen::RowVectorXd mu = matrix.entries.colwise().mean();
  Eigen::VectorXd dev(n);
  for (Eigen::Index i = 0; i < n; ++i)
    dev(i) = (matrix.entries.row(i) - mu).squaredNorm();
  const double total_dev = dev.sum();

  Sensitivities s;
  s.scores.resize(n);
  const double uniform = 1.0 / static_cast<double>(n);
  if (total_dev <= 0.0) {
    s.scores.setConstant(uniform);
  } else {
    for (Eigen::Index i = 0; i < n; ++i) s.scores(i) = uniform + dev(i) / total_dev;
  }
  s.total = s.scores.sum();
  return s;
}

Coreset sensitivity_sampling(const LossMatrix& matrix, Eigen::Index tau,
                             double delta, std::uint64_t seed) {
  if (tau < 1) throw std::invalid_argument("sensitivity_sampling needs tau >= 1");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("sensitivity_sampling needs 0 < delta < 1");
  const Eigen::Index n = matrix.rows();
  const Sensitivities s = one_mean_sensitivities(matrix);

  Eigen::VectorXd cdf(n);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    acc += s.scores(i) / s.total;
    cdf(i) = acc;
  }
  cdf(n - 1) = 1.0;

  Rng rng(derive_seed(seed, "sensitivity"));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> accum(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index draw = 0; draw < tau; ++draw) {
    const double u = unif(rng);
    const Eigen::Index pick =
        std::lower_bound(cdf.data(), cdf.data() + n, u) - cdf.data();
    accum[static_cast<std::size_t>(pick)] +=
        s.total / (static_cast<double>(tau) * s.scores(pick));
  }

  Coreset cs;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (accum[static_cast<std::size_t>(i)] > 0.0) {
      cs.indices.push_back(i);
      cs.weights.push_back(accum[static_cast<std::size_t>(i)]);
    }
  }
  cs.source = "sensitivity";
  cs.vsum_error = vsum_error(matrix, cs);
  return cs;
}

Coreset uniform_sampling(const LossMatrix& matrix, Eigen::Index tau,
                         std::uint64_t seed) {
  const Eigen::Index n = matrix.rows();
  if (tau < 1 || tau > n)
    throw std::invalid_argument("uniform_sampling needs 1 <= tau <= n");

  std::vector<Index> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), Index{0});
  Rng rng(derive_seed(seed, "uniform"));
  for (Eigen::Index k = 0; k < tau; ++k) {
    std::uniform_int_distribution<Eigen::Index> pick(k, n - 1);
    std::swap(pool[static_cast<std::size_t>(k)],
              pool[static_cast<std::size_t>(pick(rng))]);
  }

  const double weight = static_cast<double>(n) / static_cast<double>(tau);
  Coreset cs;
  for (Eigen::Index k = 0; k < tau; ++k) {
    cs.indices.push_back(pool[static_cast<std::size_t>(k)]);
    cs.weights.push_back(weight);
  }
  cs.source = "uniform";
  sort_by_index(cs);
  cs.vsum_error = vsum_error(matrix, cs);
  return cs;
}

Coreset build_vsum_coreset(const LossMatrix& matrix, const VsumRequest& request) {
  switch (request.backend) {
    case VsumBackend::Caratheodory:
      return caratheodory(matrix, request.seed);
    case VsumBackend::FrankWolfe:
      return frank_wolfe(matrix, request.target_size, request.seed);
    case VsumBackend::MedianOfMeans:
      return median_of_means(matrix, request.target_size, request.delta, request.seed);
    case VsumBackend::Sensitivity:
      return sensitivity_sampling(matrix, request.target_size, request.delta,
                                  request.seed);
    case VsumBackend::Uniform:
      return uniform_sampling(matrix, std::min(request.target_size, matrix.rows()),
                              request.seed);
  }
  throw std::invalid_argument("unknown backend");
}

}  // namespace autocore
