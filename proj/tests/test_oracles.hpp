#pragma once

// Independent test oracles. These deliberately take different computational
// routes from the library code they check: the trust-region oracle works in
// the eigenbasis with bisection, and the KKT oracle is a dense Newton solve
// of the stationarity system.

#include <Eigen/Dense>
#include <cmath>

#include "trsqp/oracle.hpp"
#include "trsqp/problem.hpp"
#include "trsqp/types.hpp"

namespace oracles {

using trsqp::Index;
using trsqp::Matrix;
using trsqp::Vector;

struct TrsOracleResult {
  Vector u;
  double value = 0;  // model value at u
  double nu = 0;
  bool boundary = false;
};

// Global minimizer of 0.5 u'Au + g'u over ||u|| <= radius via full
// eigendecomposition and bisection on the diagonal secular equation,
// including singular and hard-case instances.
inline TrsOracleResult trs_eigen_oracle(const Matrix& A, const Vector& g, double radius) {
  const Index d = A.rows();
  TrsOracleResult res;
  res.u = Vector::Zero(d);
  if (radius <= 0) return res;

  Eigen::SelfAdjointEigenSolver<Matrix> es(A);
  const Vector lam = es.eigenvalues();
  const Matrix Q = es.eigenvectors();
  const Vector gt = Q.transpose() * g;
  const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
  const double tol = 1e-12 * scale;
  const double lam_min = lam(0);

  auto model = [&](const Vector& u) { return 0.5 * u.dot(A * u) + g.dot(u); };
  auto u_of_nu = [&](double nu) {
    Vector ut(d);
    for (Index i = 0; i < d; ++i) {
      const double denom = lam(i) + nu;
      ut(i) = std::abs(denom) > 0 ? -gt(i) / denom : 0.0;
    }
    return ut;
  };

  // Interior candidate: valid when A is PSD and g has no component on the
  // null space (pseudo-inverse solution).
  if (lam_min >= -tol) {
    bool consistent = true;
    Vector ut = Vector::Zero(d);
    for (Index i = 0; i < d; ++i) {
      if (lam(i) > tol) {
        ut(i) = -gt(i) / lam(i);
      } else if (std::abs(gt(i)) > 1e-11 * std::max(1.0, g.norm())) {
        consistent = false;
      }
    }
    if (consistent && ut.norm() <= radius) {
      res.u = Q * ut;
      res.value = model(res.u);
      return res;
    }
  }

  const double nu_floor = std::max(0.0, -lam_min);
  // Hard case: bounded norm as nu approaches the critical shift.
  {
    Vector ut = Vector::Zero(d);
    bool bounded = true;
    for (Index i = 0; i < d; ++i) {
      const double denom = lam(i) + nu_floor;
      if (denom > tol) {
        ut(i) = -gt(i) / denom;
      } else if (std::abs(gt(i)) > 1e-11 * std::max(1.0, g.norm())) {
        bounded = false;  // secular function blows up; ordinary boundary root
        break;
      }
    }
    if (bounded && ut.norm() < radius) {
      // Complete along the bottom eigenvector; both roots touch the boundary,
      // keep the better model value.
      const Vector q0 = Q.col(0);
      const double b = ut.dot(q0);
      const double disc = std::max(0.0, b * b + radius * radius - ut.squaredNorm());
      const Vector cand1 = Q * ut + (-b + std::sqrt(disc)) * q0;
      const Vector cand2 = Q * ut + (-b - std::sqrt(disc)) * q0;
      res.u = model(cand1) <= model(cand2) ? cand1 : cand2;
      res.value = model(res.u);
      res.nu = nu_floor;
      res.boundary = true;
      return res;
    }
  }

  double lo = nu_floor;
  double hi = nu_floor + gt.norm() / radius + scale + 1;
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (u_of_nu(mid).norm() > radius) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  res.nu = 0.5 * (lo + hi);
  res.u = Q * u_of_nu(res.nu);
  res.value = model(res.u);
  res.boundary = true;
  return res;
}

// Newton iteration on the stacked KKT system (grad f + G'lambda, c) = 0.
// Returns the polished primal point; requires objective and constraint
// Hessians.
inline Vector newton_kkt_polish(const trsqp::ProblemInstance& p, Vector x, int max_iter = 60) {
  const Index d = p.dim_x, m = p.dim_c;
  Matrix G = p.constraint_jac(x);
  Vector lambda = -(G * G.transpose()).ldlt().solve(G * p.objective_grad(x));
  for (int it = 0; it < max_iter; ++it) {
    G = p.constraint_jac(x);
    const Vector grad_lag = p.objective_grad(x) + G.transpose() * lambda;
    const Vector c = p.constraint(x);
    if (std::hypot(grad_lag.norm(), c.norm()) <= 1e-13 * (1 + x.norm())) break;
    Matrix H = p.objective_hess(x);
    const auto ch = p.constraint_hess(x);
    for (Index i = 0; i < m; ++i) H += lambda(i) * ch[static_cast<size_t>(i)];
    Matrix K = Matrix::Zero(d + m, d + m);
    K.topLeftCorner(d, d) = H;
    K.topRightCorner(d, m) = G.transpose();
    K.bottomLeftCorner(m, d) = G;
    Vector rhs(d + m);
    rhs << -grad_lag, -c;
    const Vector step = K.fullPivLu().solve(rhs);
    x += step.head(d);
    lambda += step.tail(m);
  }
  return x;
}

// Closed-form solution of min 0.5 x'Qx - b'x s.t. Ax = a via one dense solve
// of the saddle system.
inline Vector kkt_quadratic_solution(const Matrix& Q, const Vector& b, const Matrix& A,
                                     const Vector& a) {
  const Index d = Q.rows(), m = A.rows();
  Matrix K = Matrix::Zero(d + m, d + m);
  K.topLeftCorner(d, d) = Q;
  K.topRightCorner(d, m) = A.transpose();
  K.bottomLeftCorner(m, d) = A;
  Vector rhs(d + m);
  rhs << b, a;
  return K.fullPivLu().solve(rhs).head(d);
}

// Deterministic random helpers for property tests.
inline Matrix random_matrix(trsqp::RngStream& rng, Index rows, Index cols) {
  Matrix M(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) M(i, j) = rng.normal();
  }
  return M;
}

inline Matrix random_symmetric(trsqp::RngStream& rng, Index d) {
  const Matrix M = random_matrix(rng, d, d);
  return 0.5 * (M + M.transpose());
}

inline Vector random_vector(trsqp::RngStream& rng, Index d) {
  Vector v(d);
  for (Index i = 0; i < d; ++i) v(i) = rng.normal();
  return v;
}

// Full-row-rank random Jacobian (regenerates on the unlikely rank failure).
inline Matrix random_full_rank(trsqp::RngStream& rng, Index m, Index d) {
  for (;;) {
    Matrix G = random_matrix(rng, m, d);
    Eigen::JacobiSVD<Matrix> svd(G);
    if (svd.singularValues().minCoeff() > 1e-6) return G;
  }
}

}  // namespace oracles
