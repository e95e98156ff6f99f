#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "trsqp/types.hpp"

namespace trsqp {

/// Requested capability (e.g. a Hessian oracle) that the problem does not
/// provide.
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Equality-constrained problem min f(x) s.t. c(x) = 0 with exact evaluation
/// oracles. Immutable after construction; safe to share across runs.
///
/// objective_hess and constraint_hess are optional; problems lacking them
/// support only the Id and SR1 Hessian strategies. Finite-sum problems
/// additionally expose per-component gradients (and Hessians) for the
/// single-sample oracle.
struct ProblemInstance {
  Index dim_x = 0;  // d
  Index dim_c = 0;  // m, with m < d
  std::string name;

  std::function<double(const Vector&)> objective;
  std::function<Vector(const Vector&)> objective_grad;
  std::function<Matrix(const Vector&)> objective_hess;  // optional
  std::function<Vector(const Vector&)> constraint;
  std::function<Matrix(const Vector&)> constraint_jac;
  std::function<std::vector<Matrix>(const Vector&)> constraint_hess;  // optional, m matrices

  // Finite-sum interface (empty when not a finite-sum problem).
  Index num_components = 0;
  std::function<Vector(const Vector&, Index)> component_grad;
  std::function<Matrix(const Vector&, Index)> component_hess;

  Vector x0;  // standard initial iterate

  bool has_objective_hess() const { return static_cast<bool>(objective_hess); }
  bool has_constraint_hess() const { return static_cast<bool>(constraint_hess); }
  bool has_hessian_oracle() const { return has_objective_hess() && has_constraint_hess(); }
  bool is_finite_sum() const { return num_components > 0 && static_cast<bool>(component_grad); }

  /// Lagrangian Hessian with an externally supplied objective-Hessian term
  /// (exact or sampled): H_f + sum_i lambda_i * hess(c_i).
  Matrix lagrangian_hess(const Vector& x, const Vector& lambda, const Matrix& objective_term) const {
    if (!has_constraint_hess()) {
      throw CapabilityError("problem '" + name + "' provides no constraint Hessians");
    }
    Matrix h = objective_term;
    const std::vector<Matrix> ch = constraint_hess(x);
    for (Index i = 0; i < dim_c; ++i) h += lambda(i) * ch[static_cast<size_t>(i)];
    return h;
  }
};

/// Stationarity and feasibility parts of the KKT residual at (x, lambda),
/// with the convention grad_x L = g + G^T lambda.
struct KKTResidual {
  double optimality = 0;   // ||grad + G^T lambda||
  double feasibility = 0;  // ||c||
  double total = 0;        // sqrt(optimality^2 + feasibility^2)
};

inline KKTResidual eval_kkt(const ProblemInstance& problem, const Vector& x, const Vector& grad,
                            const Vector& lambda) {
  if (x.size() != problem.dim_x || grad.size() != problem.dim_x || lambda.size() != problem.dim_c) {
    throw std::invalid_argument("eval_kkt: dimension mismatch for problem '" + problem.name + "'");
  }
  const Vector c = problem.constraint(x);
  const Matrix G = problem.constraint_jac(x);
  KKTResidual r;
  r.optimality = (grad + G.transpose() * lambda).norm();
  r.feasibility = c.norm();
  r.total = std::hypot(r.optimality, r.feasibility);
  return r;
}

/// Central-difference gradient, component i = (f(x+h e_i) - f(x-h e_i))/(2h).
inline Vector finite_diff_grad(const ProblemInstance& problem, const Vector& x, double h) {
  if (!(h > 0)) throw std::invalid_argument("finite_diff_grad: h must be positive");
  Vector g(problem.dim_x);
  Vector xp = x;
  for (Index i = 0; i < problem.dim_x; ++i) {
    const double xi = x(i);
    xp(i) = xi + h;
    const double fp = problem.objective(xp);
    xp(i) = xi - h;
    const double fm = problem.objective(xp);
    xp(i) = xi;
    g(i) = (fp - fm) / (2 * h);
  }
  return g;
}

/// Central-difference constraint Jacobian, row-by-row analogue of
/// finite_diff_grad.
inline Matrix finite_diff_jac(const ProblemInstance& problem, const Vector& x, double h) {
  if (!(h > 0)) throw std::invalid_argument("finite_diff_jac: h must be positive");
  Matrix J(problem.dim_c, problem.dim_x);
  Vector xp = x;
  for (Index i = 0; i < problem.dim_x; ++i) {
    const double xi = x(i);
    xp(i) = xi + h;
    const Vector cp = problem.constraint(xp);
    xp(i) = xi - h;
    const Vector cm = problem.constraint(xp);
    xp(i) = xi;
    J.col(i) = (cp - cm) / (2 * h);
  }
  return J;
}

/// Step scaling used by the finite-difference checks.
inline double finite_diff_step(const Vector& x) {
  return 1e-5 * std::max(1.0, x.lpNorm<Eigen::Infinity>());
}

}  // namespace trsqp
