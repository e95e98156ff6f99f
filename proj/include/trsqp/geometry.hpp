#pragma once

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>
#include <string>

#include "trsqp/types.hpp"

namespace trsqp {

/// Thrown when G G^T is numerically singular (condition >= 1e12). The solver
/// requires a full-row-rank constraint Jacobian and fails fast otherwise.
class RankDeficiencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cached factorization of the Gram matrix G G^T for an m x d constraint
/// Jacobian with m < d. One Cholesky factor serves every constraint-space
/// operation: null-space projection, the normal direction, and least-squares
/// multipliers.
template <typename Scalar>
struct ConstraintFactorization {
  MatrixX<Scalar> G;                      // m x d
  Eigen::LLT<MatrixX<Scalar>> gram_chol;  // lower factor of G G^T
  Scalar condition_estimate = 0;          // 1-norm condition of G G^T
  Scalar gram_eig_min = 0;                // extreme eigenvalues of G G^T
  Scalar gram_eig_max = 0;

  Index rows() const { return G.rows(); }
  Index cols() const { return G.cols(); }

  /// Spectral norm of G, i.e. sqrt of the largest Gram eigenvalue.
  Scalar norm_G() const { return std::sqrt(gram_eig_max); }
  Scalar sigma_min_G() const { return std::sqrt(gram_eig_min); }
};

namespace detail {

// Hager-style 1-norm estimate of (G G^T)^{-1} using the cached factor.
template <typename Scalar>
Scalar inverse_one_norm_estimate(const Eigen::LLT<MatrixX<Scalar>>& llt, Index m) {
  VectorX<Scalar> x = VectorX<Scalar>::Constant(m, Scalar(1) / Scalar(m));
  Scalar est = 0;
  for (int iter = 0; iter < 5; ++iter) {
    VectorX<Scalar> y = llt.solve(x);
    est = y.template lpNorm<1>();
    VectorX<Scalar> xi = y.unaryExpr([](Scalar v) { return v >= Scalar(0) ? Scalar(1) : Scalar(-1); });
    VectorX<Scalar> z = llt.solve(xi);  // symmetric system: A^T = A
    Index j;
    Scalar zmax = z.cwiseAbs().maxCoeff(&j);
    if (zmax <= z.dot(x)) break;
    x.setZero();
    x(j) = Scalar(1);
  }
  return est;
}

}  // namespace detail

/// Factorizes G G^T and verifies that G has (numerically) full row rank.
template <typename Scalar>
ConstraintFactorization<Scalar> factorize(const MatrixX<Scalar>& G) {
  const Index m = G.rows();
  const Index d = G.cols();
  if (m <= 0 || m >= d) {
    throw std::invalid_argument("factorize: require 0 < m < d, got m=" + std::to_string(m) +
                                ", d=" + std::to_string(d));
  }

  ConstraintFactorization<Scalar> fac;
  fac.G = G;
  MatrixX<Scalar> gram = G * G.transpose();
  fac.gram_chol.compute(gram);
  if (fac.gram_chol.info() != Eigen::Success) {
    throw RankDeficiencyError("factorize: G G^T is not positive definite (rank-deficient Jacobian)");
  }

  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(gram, Eigen::EigenvaluesOnly);
  fac.gram_eig_min = es.eigenvalues().minCoeff();
  fac.gram_eig_max = es.eigenvalues().maxCoeff();

  const Scalar norm1 = gram.cwiseAbs().colwise().sum().maxCoeff();
  fac.condition_estimate = norm1 * detail::inverse_one_norm_estimate<Scalar>(fac.gram_chol, m);
  if (!(fac.condition_estimate < Scalar(1e12)) || !(fac.gram_eig_min > Scalar(0))) {
    throw RankDeficiencyError("factorize: G G^T condition estimate " +
                              std::to_string(double(fac.condition_estimate)) + " exceeds 1e12");
  }
  return fac;
}

/// Applies the null-space projection P = I - G^T (G G^T)^{-1} G without
/// forming P.
template <typename Scalar>
VectorX<Scalar> project_null(const ConstraintFactorization<Scalar>& fac, const VectorRef<Scalar>& y) {
  return y - fac.G.transpose() * fac.gram_chol.solve(fac.G * y);
}

/// Normal direction v = -G^T (G G^T)^{-1} c; satisfies G v = -c and lies in
/// im(G^T).
template <typename Scalar>
VectorX<Scalar> normal_direction(const ConstraintFactorization<Scalar>& fac, const VectorRef<Scalar>& c) {
  return -(fac.G.transpose() * fac.gram_chol.solve(c));
}

/// Least-squares multiplier lambda = -(G G^T)^{-1} G gbar, so that
/// gbar + G^T lambda = P gbar.
template <typename Scalar>
VectorX<Scalar> ls_multiplier(const ConstraintFactorization<Scalar>& fac, const VectorRef<Scalar>& gbar) {
  return -fac.gram_chol.solve(fac.G * gbar);
}

/// Dense projected Hessian P B P, symmetrized against roundoff.
template <typename Scalar>
MatrixX<Scalar> projected_hessian(const ConstraintFactorization<Scalar>& fac, const MatrixX<Scalar>& B) {
  // B P = B - (B G^T) (G G^T)^{-1} G, then project on the left.
  MatrixX<Scalar> BP = B - (B * fac.G.transpose()) * fac.gram_chol.solve(fac.G);
  MatrixX<Scalar> A = BP - fac.G.transpose() * fac.gram_chol.solve(fac.G * BP);
  return ((A + A.transpose()) / Scalar(2)).eval();
}

}  // namespace trsqp
