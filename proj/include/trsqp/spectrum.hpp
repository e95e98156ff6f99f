#pragma once

#include <Eigen/Cholesky>
#include <cmath>
#include <utility>

#include "trsqp/types.hpp"

namespace trsqp {

namespace detail {

// Deterministic, generic start vector for power iterations.
template <typename Scalar>
VectorX<Scalar> power_start(Index d) {
  VectorX<Scalar> v(d);
  for (Index i = 0; i < d; ++i) v(i) = Scalar(std::sin(double(i) + 1.0)) + Scalar(0.5);
  v.normalize();
  return v;
}

}  // namespace detail

/// Operator 2-norm of a symmetric matrix by power iteration (50 iterations,
/// relative tolerance 1e-6). Falls back to the Frobenius upper bound when the
/// iteration has not settled.
template <typename Scalar>
Scalar operator_norm_estimate(const MatrixX<Scalar>& A, int max_iter = 50, Scalar tol = Scalar(1e-6)) {
  const Index d = A.rows();
  if (d == 0) return Scalar(0);
  if (A.isZero(Scalar(0))) return Scalar(0);
  VectorX<Scalar> v = detail::power_start<Scalar>(d);
  Scalar est = 0;
  for (int it = 0; it < max_iter; ++it) {
    VectorX<Scalar> w = A * v;
    Scalar wn = w.norm();
    if (wn == Scalar(0)) return A.norm();  // start vector in the kernel; bound suffices
    Scalar prev = est;
    est = wn;
    v = w / wn;
    if (it > 0 && std::abs(est - prev) <= tol * std::max(Scalar(1), est)) return est;
  }
  return A.norm();  // Frobenius upper bound
}

/// Smallest eigenvalue and a unit eigenvector of a symmetric matrix, via a
/// power stage on (c I - A) followed by inverse-iteration polish with the
/// shifted Cholesky factor. Avoids a full eigendecomposition.
template <typename Scalar>
std::pair<Scalar, VectorX<Scalar>> min_eigenpair(const MatrixX<Scalar>& A) {
  const Index d = A.rows();
  const Scalar fro = A.norm();
  VectorX<Scalar> q = detail::power_start<Scalar>(d);
  if (fro == Scalar(0)) return {Scalar(0), q};

  // Power stage: dominant eigenpair of (c I - A) is (c - lambda_min, q_min).
  const Scalar c = fro * Scalar(1.0001) + Scalar(1e-30);
  Scalar lam = q.dot(A * q);
  for (int it = 0; it < 300; ++it) {
    VectorX<Scalar> w = c * q - A * q;
    Scalar wn = w.norm();
    if (wn == Scalar(0)) break;
    q = w / wn;
    Scalar lam_new = q.dot(A * q);
    if (it > 10 && std::abs(lam_new - lam) <= Scalar(1e-9) * std::max(Scalar(1), fro)) {
      lam = lam_new;
      break;
    }
    lam = lam_new;
  }

  // Inverse-iteration polish: factor A + sigma I with sigma slightly above
  // -lambda_min so the shifted matrix is positive definite.
  Scalar shift_pad = std::max(Scalar(1e-10) * std::max(Scalar(1), fro), Scalar(1e-300));
  for (int round = 0; round < 60; ++round) {
    Scalar sigma = -lam + shift_pad;
    MatrixX<Scalar> M = A + sigma * MatrixX<Scalar>::Identity(d, d);
    Eigen::LLT<MatrixX<Scalar>> llt(M);
    if (llt.info() != Eigen::Success) {
      shift_pad *= Scalar(10);  // lambda_min was overestimated; widen the shift
      continue;
    }
    for (int it = 0; it < 4; ++it) {
      VectorX<Scalar> w = llt.solve(q);
      Scalar wn = w.norm();
      if (wn == Scalar(0)) break;
      q = w / wn;
    }
    Scalar lam_new = q.dot(A * q);
    if (std::abs(lam_new - lam) <= Scalar(1e-12) * std::max(Scalar(1), fro)) {
      lam = lam_new;
      break;
    }
    lam = lam_new;
    shift_pad = std::max(shift_pad / Scalar(4), Scalar(1e-14) * std::max(Scalar(1), fro));
  }
  return {lam, q};
}

}  // namespace trsqp
