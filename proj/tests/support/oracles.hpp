#pragma once

// Test-only oracles, independent of the library's computation paths: plain
// accumulation loops and brute-force scans, nothing shared with src/.

#include <cmath>
#include <random>
#include <vector>

#include "autocore/loss_matrix.hpp"
#include "autocore/types.hpp"

namespace oracles {

inline autocore::RowMatrix random_entries(Eigen::Index n, Eigen::Index z,
                                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  autocore::RowMatrix entries(n, z);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < z; ++j) entries(i, j) = unif(rng);
  return entries;
}

inline autocore::LossMatrix random_matrix(Eigen::Index n, Eigen::Index z,
                                          std::uint64_t seed) {
  return autocore::make_loss_matrix(random_entries(n, z, seed),
                                    std::vector<autocore::Query>(static_cast<std::size_t>(z)));
}

inline std::vector<double> naive_column_sums(const autocore::LossMatrix& matrix) {
  std::vector<double> sums(static_cast<std::size_t>(matrix.cols()), 0.0);
  for (Eigen::Index j = 0; j < matrix.cols(); ++j)
    for (Eigen::Index i = 0; i < matrix.rows(); ++i)
      sums[static_cast<std::size_t>(j)] += matrix.entries(i, j);
  return sums;
}

inline double naive_vsum_error(const autocore::LossMatrix& matrix,
                               const autocore::Coreset& coreset) {
  double error = 0.0;
  for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
    double full = 0.0;
    for (Eigen::Index i = 0; i < matrix.rows(); ++i) full += matrix.entries(i, j);
    double approx = 0.0;
    for (std::size_t k = 0; k < coreset.indices.size(); ++k)
      approx += coreset.weights[k] * matrix.entries(coreset.indices[k], j);
    error += (full - approx) * (full - approx);
  }
  return error;
}

// max pairwise row distance, brute force
inline double bruteforce_diameter(const autocore::LossMatrix& matrix) {
  double best = 0.0;
  for (Eigen::Index a = 0; a < matrix.rows(); ++a)
    for (Eigen::Index b = a + 1; b < matrix.rows(); ++b)
      best = std::max(best, (matrix.entries.row(a) - matrix.entries.row(b)).norm());
  return best;
}

// reference replay of the patience rule, straight from its description
struct StopReplay {
  int stop_index = -1;  // index of the sum that triggered the stop
  int best_index = -1;
};

inline StopReplay replay_patience(const std::vector<double>& sums, int patience) {
  StopReplay out;
  double best = std::numeric_limits<double>::infinity();
  int counter = 0;
  for (std::size_t i = 0; i < sums.size(); ++i) {
    if (sums[i] < best) {
      best = sums[i];
      out.best_index = static_cast<int>(i);
      counter = 0;
    } else {
      ++counter;
    }
    if (counter >= patience) {
      out.stop_index = static_cast<int>(i);
      break;
    }
  }
  return out;
}

}  // namespace oracles
