#include "autocore/loss_matrix.hpp"

#include <cmath>

namespace autocore {

LossMatrix make_loss_matrix(RowMatrix entries, std::vector<Query> queries) {
  if (entries.cols() != static_cast<Eigen::Index>(queries.size()))
    throw std::invalid_argument("column count does not match query count");
  if (entries.rows() < 1 || entries.cols() < 1)
    throw std::invalid_argument("loss matrix needs n >= 1 and z >= 1");
  for (Eigen::Index i = 0; i < entries.rows(); ++i)
    for (Eigen::Index j = 0; j < entries.cols(); ++j) {
      const double v = entries(i, j);
      if (!(v >= 0.0) || !std::isfinite(v))
        throw std::invalid_argument("loss entry at row " + std::to_string(i) +
                                    ", col " + std::to_string(j) +
                                    " is negative or non-finite");
    }
  return LossMatrix{std::move(entries), std::move(queries)};
}

LossMatrix append_column(const LossMatrix& matrix, const Eigen::VectorXd& column,
                         const Query& query) {
  if (column.size() != matrix.rows())
    throw std::invalid_argument("column length " + std::to_string(column.size()) +
                                " does not match row count " +
                                std::to_string(matrix.rows()));
  for (Eigen::Index i = 0; i < column.size(); ++i) {
    const double v = column(i);
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("appended column has a negative or non-finite "
                                  "entry at row " + std::to_string(i));
  }
  LossMatrix out;
  out.entries.resize(matrix.rows(), matrix.cols() + 1);
  out.entries.leftCols(matrix.cols()) = matrix.entries;
  out.entries.col(matrix.cols()) = column;
  out.queries = matrix.queries;
  out.queries.push_back(query);
  return out;
}

Eigen::VectorXd column_sums(const LossMatrix& matrix) {
  if (matrix.rows() == 0 || matrix.cols() == 0)
    throw std::invalid_argument("column_sums on an empty matrix");
  return matrix.entries.colwise().sum().transpose();
}

LossMatrix matrix_prefix(const LossMatrix& matrix, Eigen::Index z) {
  if (z < 1 || z > matrix.cols())
    throw std::invalid_argument("prefix width out of range");
  LossMatrix out;
  out.entries = matrix.entries.leftCols(z);
  out.queries.assign(matrix.queries.begin(), matrix.queries.begin() + z);
  return out;
}

}  // namespace autocore
