#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "trsqp/geometry.hpp"
#include "trsqp/trsub.hpp"
#include "trsqp/types.hpp"

namespace trsqp {

/// Trust-region radius decomposed in proportion to the estimated feasibility
/// and optimality residuals: delta_feas^2 + delta_opt^2 = delta^2.
template <typename Scalar>
struct RadiusSplit {
  Scalar delta = 0;
  Scalar delta_feas = 0;  // budget of the normal step
  Scalar delta_opt = 0;   // budget of the tangential step
};

template <typename Scalar>
RadiusSplit<Scalar> split_radius(Scalar delta, Scalar feas_res, Scalar opt_res) {
  const Scalar total = std::hypot(feas_res, opt_res);
  if (!(total > Scalar(0))) {
    throw std::invalid_argument("split_radius: zero estimated KKT residual");
  }
  return {delta, delta * (feas_res / total), delta * (opt_res / total)};
}

/// Relaxation factor for the normal step: gamma = min(delta_feas/||v||, 1).
/// Callers handle v = 0 (i.e. c = 0) by taking a pure tangential step.
template <typename Scalar>
Scalar relaxation_factor(Scalar delta_feas, Scalar v_norm) {
  return std::min(delta_feas / v_norm, Scalar(1));
}

/// Trial step: normal part w = gamma*v, tangential part t = P u, with w
/// orthogonal to t, ||trial|| <= delta, and linearized feasibility reduced by
/// the exact factor (1 - gamma).
template <typename Scalar>
struct StepDecomposition {
  Scalar gamma = 1;
  VectorX<Scalar> normal;
  VectorX<Scalar> tangential;
  VectorX<Scalar> trial;
  RadiusSplit<Scalar> split;
  TangentialSolution<Scalar> tangent;
  Scalar linearized_feas = 0;  // ||c + G*trial||
};

template <typename Scalar>
StepDecomposition<Scalar> assemble_step(const ConstraintFactorization<Scalar>& fac,
                                        const VectorRef<Scalar>& gbar, const VectorRef<Scalar>& c,
                                        const MatrixX<Scalar>& B, const RadiusSplit<Scalar>& split,
                                        TrsMethod method, Scalar norm_B, Scalar tol = Scalar(1e-8)) {
  StepDecomposition<Scalar> step;
  step.split = split;

  VectorX<Scalar> v = normal_direction<Scalar>(fac, c);
  const Scalar vn = v.norm();
  if (vn == Scalar(0) && c.norm() > Scalar(0)) {
    // Unreachable with a full-row-rank Jacobian: v = 0 iff c = 0.
    throw std::logic_error("assemble_step: zero normal direction with nonzero constraint");
  }
  step.gamma = (vn > Scalar(0)) ? relaxation_factor<Scalar>(split.delta_feas, vn) : Scalar(1);
  step.normal = step.gamma * v;

  VectorX<Scalar> pg = project_null<Scalar>(fac, gbar);
  MatrixX<Scalar> pbp = projected_hessian<Scalar>(fac, B);
  step.tangent = solve_tangential<Scalar>(pbp, pg, split.delta_opt, method, norm_B, tol);
  step.tangential = project_null<Scalar>(fac, step.tangent.u);  // remove drift out of ker(G)
  step.trial = step.normal + step.tangential;

  // Floating-point guard; mathematically unreachable since ||w|| <= delta_feas
  // and ||t|| <= delta_opt already.
  if (step.trial.norm() > split.delta * (Scalar(1) + Scalar(1e-10))) {
    const Scalar wn2 = step.normal.squaredNorm();
    const Scalar tn2 = step.tangential.squaredNorm();
    if (tn2 > Scalar(0)) {
      step.tangential *= std::sqrt(std::max(Scalar(0), split.delta * split.delta - wn2) / tn2);
    }
    step.trial = step.normal + step.tangential;
  }

  step.linearized_feas = (c + fac.G * step.trial).norm();
  return step;
}

}  // namespace trsqp
