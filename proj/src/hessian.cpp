#include "trsqp/hessian.hpp"

#include <cmath>
#include <string>

namespace trsqp {

Matrix sr1_update(const Matrix& H_prev, const Vector& dx, const Vector& y, bool* skipped) {
  const Vector r = y - H_prev * dx;
  const double denom = r.dot(dx);
  if (std::abs(denom) < 1e-8 * r.norm() * dx.norm() || denom == 0.0) {
    if (skipped) *skipped = true;
    return H_prev;
  }
  if (skipped) *skipped = false;
  return H_prev + (r * r.transpose()) / denom;
}

HessianStrategy::HessianStrategy(HessianKind kind, Index dim, Index window)
    : kind_(kind), dim_(dim), window_(window) {
  if (kind_ == HessianKind::SR1) sr1_h_ = Matrix::Identity(dim_, dim_);
  if (kind_ == HessianKind::AveH) ring_sum_ = Matrix::Zero(dim_, dim_);
}

Matrix HessianStrategy::produce(long k) {
  if (k != produced_ || recorded_ != produced_) {
    throw std::logic_error("HessianStrategy::produce called out of order at k=" + std::to_string(k));
  }
  ++produced_;
  if (k == 0) return Matrix::Identity(dim_, dim_);
  switch (kind_) {
    case HessianKind::Id:
      return Matrix::Identity(dim_, dim_);
    case HessianKind::SR1:
      return sr1_h_;  // H_{k-1}
    case HessianKind::EstH:
      return have_sample_ ? last_sample_ : Matrix::Identity(dim_, dim_);
    case HessianKind::AveH:
      if (ring_.empty()) return Matrix::Identity(dim_, dim_);
      return ring_sum_ / double(ring_.size());
  }
  throw std::logic_error("HessianStrategy::produce: unknown kind");
}

void HessianStrategy::record(long k, const Vector& x, const Vector& grad_lag,
                             const std::optional<Matrix>& sampled_lagr_hess) {
  if (k != recorded_ || produced_ != recorded_ + 1) {
    throw std::logic_error("HessianStrategy::record called out of order at k=" + std::to_string(k));
  }
  ++recorded_;
  switch (kind_) {
    case HessianKind::Id:
      break;
    case HessianKind::SR1: {
      if (k >= 1) {  // H_k from the secant pair (x_k - x_{k-1}, gradL_k - gradL_{k-1})
        bool skipped = false;
        sr1_h_ = sr1_update(sr1_h_, x - last_x_, grad_lag - last_grad_lag_, &skipped);
        if (skipped) ++sr1_skips_;
      }
      last_x_ = x;
      last_grad_lag_ = grad_lag;
      break;
    }
    case HessianKind::EstH:
      if (!sampled_lagr_hess) {
        throw std::logic_error("HessianStrategy::record: EstH requires a sampled Hessian");
      }
      last_sample_ = *sampled_lagr_hess;
      have_sample_ = true;
      break;
    case HessianKind::AveH: {
      if (!sampled_lagr_hess) {
        throw std::logic_error("HessianStrategy::record: AveH requires a sampled Hessian");
      }
      ring_.push_back(*sampled_lagr_hess);
      ring_sum_ += ring_.back();
      if (static_cast<Index>(ring_.size()) > window_) {
        ring_sum_ -= ring_.front();
        ring_.pop_front();
      }
      // Periodic exact refresh keeps the running sum free of roundoff drift.
      if (++ring_pushes_ % 100 == 0) {
        ring_sum_.setZero();
        for (const Matrix& h : ring_) ring_sum_ += h;
      }
      break;
    }
  }
}

}  // namespace trsqp
