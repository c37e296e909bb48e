#pragma once

#include <cstdint>
#include <string>

#include "autocore/loss_matrix.hpp"
#include "autocore/types.hpp"

namespace autocore {

// Vector-summarization backends: weighted row subsets whose weighted row-sum
// approximates the full row-sum (squared Euclidean error).

enum class VsumBackend { Caratheodory, FrankWolfe, MedianOfMeans, Sensitivity, Uniform };

std::string backend_name(VsumBackend backend);
VsumBackend backend_from_name(const std::string& name);

struct VsumRequest {
  Eigen::Index target_size = 1;  // tau
  double epsilon = 0.0;          // recorded goal, informational
  double delta = 0.1;            // failure probability for randomized backends
  VsumBackend backend = VsumBackend::Uniform;
  std::uint64_t seed = 0;
};

// || sum_i M_i - sum_{j in I} v(j) M_j ||_2^2
double vsum_error(const LossMatrix& matrix, const Coreset& coreset);

// Exact backend: at most z+1 rows whose weighted sum reproduces the row-sum
// at floating-point scale.
Coreset caratheodory(const LossMatrix& matrix, std::uint64_t seed);

// Greedy sparse approximation of the row mean; error non-increasing in tau.
Coreset frank_wolfe(const LossMatrix& matrix, Eigen::Index tau, std::uint64_t seed);

struct MedianOfMeansDetail {
  std::vector<std::vector<Index>> buckets;
  Eigen::MatrixXd bucket_means;       // one row per bucket
  Eigen::RowVectorXd geometric_median;
  Eigen::Index chosen = 0;
};

// Bucketed tournament: returns the bucket whose mean is nearest the geometric
// median of the bucket means.
Coreset median_of_means(const LossMatrix& matrix, Eigen::Index tau, double delta,
                        std::uint64_t seed, MedianOfMeansDetail* detail = nullptr);

struct Sensitivities {
  Eigen::VectorXd scores;  // s_i >= 1/n
  double total = 0.0;      // 2 unless all rows coincide
};

// 1-mean surrogate: s_i = 1/n + ||u_i - mu||^2 / sum_j ||u_j - mu||^2.
Sensitivities one_mean_sensitivities(const LossMatrix& matrix);

// tau i.i.d. draws with q_i = s_i / t; repeats accumulate weight t/(tau*s_i).
Coreset sensitivity_sampling(const LossMatrix& matrix, Eigen::Index tau,
                             double delta, std::uint64_t seed);

// tau distinct indices without replacement, each weighted n/tau.
Coreset uniform_sampling(const LossMatrix& matrix, Eigen::Index tau,
                         std::uint64_t seed);

Coreset build_vsum_coreset(const LossMatrix& matrix, const VsumRequest& request);

}  // namespace autocore
