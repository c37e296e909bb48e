#include "autocore/synthetic.hpp"

#include <cmath>

#include "autocore/rng.hpp"

namespace autocore {

namespace {

Dataset make_blobs(const SyntheticSpec& spec, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Eigen::VectorXd direction(spec.d);
  for (Eigen::Index j = 0; j < spec.d; ++j) direction(j) = gauss(rng);
  direction.normalize();
  const Eigen::VectorXd offset = 0.5 * spec.separation * direction;

  Eigen::MatrixXd points(spec.n, spec.d);
  Eigen::VectorXd labels(spec.n);
  for (Eigen::Index i = 0; i < spec.n; ++i) {
    const bool positive = unif(rng) < spec.balance;
    labels(i) = positive ? 1.0 : -1.0;
    for (Eigen::Index j = 0; j < spec.d; ++j)
      points(i, j) = spec.noise * gauss(rng) + (positive ? offset(j) : -offset(j));
  }
  return make_dataset(std::move(points), std::move(labels), "blobs");
}

Dataset make_linear(const SyntheticSpec& spec, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd w(spec.d);
  for (Eigen::Index j = 0; j < spec.d; ++j) w(j) = gauss(rng);
  const double intercept = gauss(rng);

  Eigen::MatrixXd points(spec.n, spec.d);
  Eigen::VectorXd labels(spec.n);
  for (Eigen::Index i = 0; i < spec.n; ++i) {
    for (Eigen::Index j = 0; j < spec.d; ++j) points(i, j) = gauss(rng);
    labels(i) = points.row(i).dot(w) + intercept + spec.noise * gauss(rng);
  }
  return make_dataset(std::move(points), std::move(labels), "linear");
}

Dataset make_mixture(const SyntheticSpec& spec, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> component(0, spec.k - 1);

  Eigen::MatrixXd centers(spec.k, spec.d);
  for (int c = 0; c < spec.k; ++c) {
    Eigen::VectorXd dir(spec.d);
    for (Eigen::Index j = 0; j < spec.d; ++j) dir(j) = gauss(rng);
    dir.normalize();
    centers.row(c) = (spec.separation * (1.0 + c)) * dir.transpose();
  }

  Eigen::MatrixXd points(spec.n, spec.d);
  for (Eigen::Index i = 0; i < spec.n; ++i) {
    const int c = component(rng);
    for (Eigen::Index j = 0; j < spec.d; ++j)
      points(i, j) = centers(c, j) + spec.noise * gauss(rng);
  }
  return make_dataset(std::move(points), std::nullopt, "mixture");
}

}  // namespace

Dataset generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  if (spec.n < 1 || spec.d < 1)
    throw std::invalid_argument("synthetic spec needs n >= 1 and d >= 1");
  std::string kind = spec.generator;
  if (kind == "two-gaussian-blobs") kind = "blobs";
  if (kind == "linear-with-noise") kind = "linear";
  if (kind == "gaussian-mixture-k") kind = "mixture";
  Rng rng(derive_seed(seed, "synthetic-" + kind));
  if (kind == "blobs") return make_blobs(spec, rng);
  if (kind == "linear") return make_linear(spec, rng);
  if (kind == "mixture") {
    if (spec.k < 1) throw std::invalid_argument("mixture needs k >= 1");
    return make_mixture(spec, rng);
  }
  throw std::invalid_argument("unknown generator: " + spec.generator);
}

}  // namespace autocore
