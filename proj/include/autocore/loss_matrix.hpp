#pragma once

#include <Eigen/Dense>
#include <vector>

#include "autocore/types.hpp"

namespace autocore {

// The n x z matrix of per-point losses, one column per discovered query.
// Immutable value type; append_column returns the extended matrix.
struct LossMatrix {
  RowMatrix entries;           // n x z, entries >= 0
  std::vector<Query> queries;  // length z, column j <-> queries[j]

  Eigen::Index rows() const { return entries.rows(); }
  Eigen::Index cols() const { return entries.cols(); }
};

LossMatrix make_loss_matrix(RowMatrix entries, std::vector<Query> queries);

// Appends one column; prior columns are untouched. Rejects a column of the
// wrong length and reports the row index of any negative/non-finite entry.
LossMatrix append_column(const LossMatrix& matrix, const Eigen::VectorXd& column,
                         const Query& query);

Eigen::VectorXd column_sums(const LossMatrix& matrix);

// First z columns as a value (used for optimal-iteration replays).
LossMatrix matrix_prefix(const LossMatrix& matrix, Eigen::Index z);

}  // namespace autocore
