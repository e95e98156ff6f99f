#pragma once

#include <limits>
#include <stdexcept>
#include <utility>

#include "trsqp/types.hpp"

namespace trsqp {

/// Per-iteration control parameters derived from known or estimable
/// quantities; they adjust the input radius sequence {beta_k} into the
/// trust-region radius. Computed before the iteration's gradient draw.
template <typename Scalar>
struct ControlParams {
  Scalar eta1 = 0;
  Scalar eta2 = 0;
  Scalar tau = 0;
  Scalar alpha = 0;
  Scalar norm_B = 0;
  Scalar norm_G = 0;
  Scalar L_grad = 0;
  Scalar L_jac = 0;
};

template <typename Scalar>
ControlParams<Scalar> control_params(Scalar zeta, Scalar beta_k, Scalar beta_max, Scalar norm_B,
                                     Scalar norm_G, Scalar L_grad, Scalar L_jac, Scalar mu_prev) {
  ControlParams<Scalar> cp;
  cp.norm_B = norm_B;
  cp.norm_G = norm_G;
  cp.L_grad = L_grad;
  cp.L_jac = L_jac;
  const Scalar inv_b = norm_B > Scalar(0) ? Scalar(1) / norm_B : std::numeric_limits<Scalar>::infinity();
  cp.eta1 = zeta * std::min(inv_b, Scalar(6) * beta_max / norm_G);
  cp.tau = L_grad + L_jac * mu_prev + norm_B;
  cp.alpha = beta_k / ((Scalar(4) * cp.eta1 * cp.tau + Scalar(6) * zeta) * beta_max);
  cp.eta2 = cp.eta1 - Scalar(0.5) * zeta * cp.eta1 * cp.alpha;
  return cp;
}

/// Three-branch radius rule keyed on the estimated KKT residual; returns the
/// radius and the branch label (1, 2, or 3).
template <typename Scalar>
std::pair<Scalar, int> radius(const ControlParams<Scalar>& cp, Scalar est_kkt) {
  if (!(est_kkt > Scalar(0))) {
    throw std::invalid_argument("radius: estimated KKT residual must be positive");
  }
  if (est_kkt < Scalar(1) / cp.eta1) return {cp.eta1 * cp.alpha * est_kkt, 1};
  if (est_kkt <= Scalar(1) / cp.eta2) return {cp.alpha, 2};
  return {cp.eta2 * cp.alpha * est_kkt, 3};
}

}  // namespace trsqp
