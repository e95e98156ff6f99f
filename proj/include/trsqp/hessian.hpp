#pragma once

#include <deque>
#include <optional>
#include <stdexcept>

#include "trsqp/types.hpp"

namespace trsqp {

enum class HessianKind { Id, SR1, EstH, AveH };

/// Symmetric rank-one secant update H + r r^T / (r^T dx) with r = y - H dx.
/// Skipped (H returned unchanged) when |r^T dx| < 1e-8 * ||r|| * ||dx||.
/// `skipped`, when provided, reports whether the safeguard fired.
Matrix sr1_update(const Matrix& H_prev, const Vector& dx, const Vector& y, bool* skipped = nullptr);

/// Produces the Lagrangian-Hessian approximation B_k for the four strategies.
///
/// Call order per iteration k: produce(k) first, then record(k, ...) with the
/// information revealed by the k-th gradient draw. produce(k) therefore only
/// sees quantities from iterations <= k-1; the ordering is asserted.
class HessianStrategy {
 public:
  HessianStrategy(HessianKind kind, Index dim, Index window = 100);

  HessianKind kind() const { return kind_; }
  bool needs_hessian_samples() const { return kind_ == HessianKind::EstH || kind_ == HessianKind::AveH; }
  long sr1_skip_count() const { return sr1_skips_; }

  /// B_k; the identity for every strategy at k = 0.
  Matrix produce(long k);

  /// Records iteration k: the iterate, the estimated Lagrangian gradient
  /// grad_lag = gbar + G^T lambda, and (EstH/AveH only) the sampled
  /// Lagrangian Hessian built with this iteration's multiplier.
  void record(long k, const Vector& x, const Vector& grad_lag,
              const std::optional<Matrix>& sampled_lagr_hess = std::nullopt);

 private:
  HessianKind kind_;
  Index dim_;
  Index window_;
  long produced_ = 0;  // produce() has run for iterations [0, produced_)
  long recorded_ = 0;

  // SR1 state: after record(k) this holds H_k, which produce(k+1) serves as
  // B_{k+1} = H_k.
  Matrix sr1_h_;
  Vector last_x_;
  Vector last_grad_lag_;
  long sr1_skips_ = 0;

  // EstH: most recent sampled Lagrangian Hessian.
  Matrix last_sample_;
  bool have_sample_ = false;

  // AveH: ring buffer plus running sum, refreshed periodically against drift.
  std::deque<Matrix> ring_;
  Matrix ring_sum_;
  long ring_pushes_ = 0;
};

}  // namespace trsqp
