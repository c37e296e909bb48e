#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

#include "autocore/types.hpp"

namespace autocore {

// Per-point loss f : (point, query) -> [0, inf). Points arrive as a feature
// row plus an optional label; regularization is a solver concern, not part
// of f.
struct LossFunction {
  Task kind = Task::LinearRegression;
  std::string name;
  std::function<double(const Eigen::RowVectorXd&, double label, const Query&)>
      eval;
};

const LossFunction& builtin_loss(Task task);

double eval_loss(const LossFunction& loss, const Dataset& data, Eigen::Index i,
                 const Query& query);

Eigen::VectorXd eval_loss_column(const LossFunction& loss, const Dataset& data,
                                 const Query& query);

// g-transform: column / sqrt(sum(column)); the zero column maps to itself.
Eigen::VectorXd multiplicative_transform(const Eigen::VectorXd& column);

// Stable ln(1 + exp(-t)).
double log1p_exp_neg(double t);

// Plug-in registry. Registration probes the loss on 100 seeded random
// (point, query) pairs and rejects any loss that produces a negative or
// non-finite value.
void register_loss(const LossFunction& loss);
bool has_registered_loss(const std::string& name);
const LossFunction& registered_loss(const std::string& name);

}  // namespace autocore
