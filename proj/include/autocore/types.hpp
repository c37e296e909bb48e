#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace autocore {

using Index = std::int64_t;

// Losses are consumed row-wise by the summarization backends, so the loss
// matrix is stored row-major; everything else uses Eigen defaults.
using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Task { LinearRegression, LogisticRegression, Svm, KMeans };

std::string task_name(Task task);
Task task_from_name(const std::string& name);
bool task_needs_labels(Task task);
bool task_is_classification(Task task);

// A candidate model: weight vector plus intercept for the linear tasks, a
// k x d center matrix for k-means.
struct Query {
  Task kind = Task::LinearRegression;
  Eigen::VectorXd params;   // [w_0..w_{d-1}, b] for linear tasks
  Eigen::MatrixXd centers;  // k x d, k-means only

  bool valid_for_dim(Eigen::Index d) const;
  void require_valid(Eigen::Index d) const;
};

double query_distance(const Query& a, const Query& b);

struct Dataset {
  Eigen::MatrixXd points;  // n x d feature rows
  std::optional<Eigen::VectorXd> labels;
  std::string name;

  Eigen::Index n() const { return points.rows(); }
  Eigen::Index dim() const { return points.cols(); }
  bool has_labels() const { return labels.has_value(); }
  double label(Eigen::Index i) const { return (*labels)(i); }
};

// Validates invariants (finiteness, label count, {-1,+1} labels when asked)
// and throws std::invalid_argument on violation.
Dataset make_dataset(Eigen::MatrixXd points,
                     std::optional<Eigen::VectorXd> labels = std::nullopt,
                     std::string name = "");
void require_valid_for_task(const Dataset& data, Task task);

// Weighted index subset. Indices are sorted ascending and unique; weights are
// nonnegative and aligned with indices.
struct Coreset {
  std::vector<Index> indices;
  std::vector<double> weights;
  std::string source;
  double vsum_error = 0.0;  // Definition-1 error on the matrix it came from
  bool degenerate = false;  // set when a backend had to bail out

  std::size_t size() const { return indices.size(); }
};

Coreset identity_coreset(Index n, const std::string& source = "identity");
void require_valid_coreset(const Coreset& cs, Index n);

struct ConvexWeights {
  std::vector<double> alpha;
};

// Throws unless alpha is on the simplex to 1e-12.
ConvexWeights make_convex_weights(std::vector<double> alpha);

struct IterationRecord {
  double column_sum = 0.0;   // raw (pre-transform) sum of the appended column
  double vsum_error = 0.0;   // error of the coreset built this iteration
  int coreset_size = 0;
  int patience_counter = 0;
  double elapsed_seconds = 0.0;
  bool solver_converged = true;
};

struct RunTrace {
  std::vector<IterationRecord> records;
  int best_iteration = -1;  // index into records of the smallest column sum
};

}  // namespace autocore
