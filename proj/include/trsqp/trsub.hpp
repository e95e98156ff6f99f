#pragma once

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "trsqp/spectrum.hpp"
#include "trsqp/types.hpp"

namespace trsqp {

enum class TrsMethod { cauchy, dogleg, exact };

/// Solution of min_u 0.5 u^T A u + g^T u s.t. ||u|| <= radius, where A is the
/// projected Hessian P B P (symmetric, typically singular, possibly
/// indefinite) and g the projected gradient.
template <typename Scalar>
struct TangentialSolution {
  VectorX<Scalar> u;
  Scalar model_reduction = 0;  // m(u) - m(0), nonpositive
  TrsMethod solver_used = TrsMethod::cauchy;
  bool boundary_active = false;
  Scalar multiplier = 0;  // shift nu >= 0 of the exact solver; 0 for interior solutions
  bool fallback = false;  // dogleg declined the model and fell back to cauchy
};

template <typename Scalar>
Scalar model_value(const MatrixX<Scalar>& A, const VectorRef<Scalar>& g, const VectorRef<Scalar>& u) {
  return Scalar(0.5) * u.dot(A * u) + g.dot(u);
}

/// Two-branch Cauchy point along -g: the exact minimizer of the model on the
/// steepest-descent ray within the radius.
template <typename Scalar>
TangentialSolution<Scalar> cauchy_point(const MatrixX<Scalar>& A, const VectorRef<Scalar>& g,
                                        Scalar norm_B, Scalar radius) {
  (void)norm_B;
  TangentialSolution<Scalar> sol;
  sol.solver_used = TrsMethod::cauchy;
  sol.u = VectorX<Scalar>::Zero(g.size());
  const Scalar gn = g.norm();
  if (radius <= Scalar(0) || gn == Scalar(0)) return sol;

  const Scalar curvature = g.dot(A * g);  // g^T A g
  if (gn * gn * gn <= radius * curvature) {
    sol.u = -(gn * gn / curvature) * g;
    sol.boundary_active = sol.u.norm() >= radius * (Scalar(1) - Scalar(1e-12));
  } else {
    sol.u = -(radius / gn) * g;
    sol.boundary_active = true;
  }
  sol.model_reduction = model_value<Scalar>(A, g, sol.u);
  return sol;
}

namespace detail {

// Root tau of ||base + tau*dir|| = radius with tau >= 0 (two boundary roots
// exist when ||base|| < radius; both are returned).
template <typename Scalar>
std::pair<Scalar, Scalar> boundary_roots(const VectorX<Scalar>& base, const VectorX<Scalar>& dir,
                                         Scalar radius) {
  const Scalar a = dir.squaredNorm();
  const Scalar b = base.dot(dir);
  const Scalar c = base.squaredNorm() - radius * radius;
  const Scalar disc = std::max(Scalar(0), b * b - a * c);
  const Scalar root = std::sqrt(disc);
  // Numerically stable pair of roots of a t^2 + 2 b t + c = 0.
  Scalar t1, t2;
  if (b >= Scalar(0)) {
    t1 = (-b - root) / a;
    t2 = (a == Scalar(0)) ? t1 : c / (a * t1);
  } else {
    t2 = (-b + root) / a;
    t1 = (a == Scalar(0)) ? t2 : c / (a * t2);
  }
  return {t1, t2};
}

template <typename Scalar>
TangentialSolution<Scalar> solve_exact(const MatrixX<Scalar>& A, const VectorRef<Scalar>& g,
                                       Scalar radius, Scalar tol) {
  const Index d = A.rows();
  TangentialSolution<Scalar> sol;
  sol.solver_used = TrsMethod::exact;
  sol.u = VectorX<Scalar>::Zero(d);
  if (radius <= Scalar(0)) return sol;

  const Scalar gn = g.norm();
  const Scalar fro = A.norm();
  const Scalar eps0 = Scalar(1e-13) * std::max(Scalar(1), fro);
  const MatrixX<Scalar> id = MatrixX<Scalar>::Identity(d, d);

  auto finish = [&](VectorX<Scalar> u, Scalar nu, bool boundary) {
    sol.u = std::move(u);
    sol.multiplier = nu;
    sol.boundary_active = boundary;
    sol.model_reduction = model_value<Scalar>(A, g, sol.u);
    return sol;
  };

  const auto [lam_min, q_min] = min_eigenpair(A);

  if (gn == Scalar(0)) {
    if (lam_min >= -eps0) return finish(VectorX<Scalar>::Zero(d), Scalar(0), false);
    return finish(radius * q_min, -lam_min, true);
  }

  // Interior Newton point when A is safely positive definite.
  if (lam_min > eps0) {
    Eigen::LLT<MatrixX<Scalar>> llt(A);
    if (llt.info() == Eigen::Success) {
      VectorX<Scalar> u0 = llt.solve(-g);
      if (u0.norm() <= radius) return finish(std::move(u0), Scalar(0), false);
    }
  }

  const Scalar lam_shift = std::max(Scalar(0), -lam_min);

  // Probe just above the critical shift. A short step there separates the
  // hard case (bounded ||u||) from the ordinary boundary case.
  Scalar delta_reg = std::max(Scalar(1e-11) * (fro + gn / radius), Scalar(1e-290));
  Eigen::LLT<MatrixX<Scalar>> llt_probe;
  Scalar nu_probe = 0;
  for (int attempt = 0; attempt < 8; ++attempt) {
    nu_probe = lam_shift + delta_reg;
    llt_probe.compute(A + nu_probe * id);
    if (llt_probe.info() == Eigen::Success) break;
    delta_reg *= Scalar(100);
  }
  if (llt_probe.info() == Eigen::Success) {
    VectorX<Scalar> up = llt_probe.solve(-g);
    if (up.norm() < radius) {
      if (lam_min >= -eps0) return finish(std::move(up), Scalar(0), false);  // singular PSD, interior
      // Hard case: complete to the boundary along the bottom eigenvector.
      auto [t1, t2] = boundary_roots<Scalar>(up, q_min, radius);
      VectorX<Scalar> cand1 = up + t1 * q_min;
      VectorX<Scalar> cand2 = up + t2 * q_min;
      const bool first = model_value<Scalar>(A, g, cand1) <= model_value<Scalar>(A, g, cand2);
      return finish(first ? std::move(cand1) : std::move(cand2), lam_shift, true);
    }
  }

  // Safeguarded Newton (Hebden iteration) on 1/radius - 1/||u(nu)||.
  Scalar nu_lo = lam_shift;
  Scalar nu_hi = gn / radius + fro + Scalar(1e-6);  // guarantees ||u(nu_hi)|| <= radius
  Scalar nu = std::min(std::max(nu_probe, nu_lo + Scalar(1e-3) * (nu_hi - nu_lo) * Scalar(1e-8)), nu_hi);
  VectorX<Scalar> u_in;  // best iterate observed on the ||u|| < radius side
  Scalar nu_in = 0;
  bool have_in = false;
  int polish = 0;

  for (int it = 0; it < 200; ++it) {
    Eigen::LLT<MatrixX<Scalar>> llt(A + nu * id);
    if (llt.info() != Eigen::Success) {
      nu_lo = std::max(nu_lo, nu);
      nu = nu_lo + Scalar(0.5) * (nu_hi - nu_lo);
      continue;
    }
    VectorX<Scalar> u = llt.solve(-g);
    const Scalar un = u.norm();
    if (un < radius) {
      nu_hi = nu;
      u_in = u;
      nu_in = nu;
      have_in = true;
    } else {
      nu_lo = nu;
    }
    if (std::abs(un - radius) <= tol * radius) {
      if (polish++ >= 1) return finish(std::move(u), nu, true);  // one extra Newton step past tol
    }
    if (nu_hi - nu_lo <= Scalar(1e-14) * std::max(Scalar(1), nu_hi)) break;  // near-hard collapse

    VectorX<Scalar> w = llt.matrixL().solve(u);
    const Scalar wn2 = w.squaredNorm();
    Scalar nu_next = (wn2 > Scalar(0)) ? nu + (un * un / wn2) * (un - radius) / radius : nu;
    if (!(nu_next > nu_lo) || !(nu_next < nu_hi)) {
      nu_next = std::max(std::sqrt(std::max(nu_lo, Scalar(1e-300)) * nu_hi),
                         nu_lo + Scalar(0.01) * (nu_hi - nu_lo));
    }
    nu = nu_next;
  }

  // Interval collapsed without meeting the boundary equation: near-hard case.
  if (have_in) {
    auto [t1, t2] = boundary_roots<Scalar>(u_in, q_min, radius);
    VectorX<Scalar> cand1 = u_in + t1 * q_min;
    VectorX<Scalar> cand2 = u_in + t2 * q_min;
    const bool first = model_value<Scalar>(A, g, cand1) <= model_value<Scalar>(A, g, cand2);
    return finish(first ? std::move(cand1) : std::move(cand2), nu_in, true);
  }
  // Should be unreachable; fall back to the boundary steepest-descent step.
  return finish((-radius / gn) * VectorX<Scalar>(g), lam_shift, true);
}

template <typename Scalar>
TangentialSolution<Scalar> solve_dogleg(const MatrixX<Scalar>& A, const VectorRef<Scalar>& g,
                                        Scalar norm_B, Scalar radius) {
  TangentialSolution<Scalar> cp = cauchy_point<Scalar>(A, g, norm_B, radius);
  const Scalar gn = g.norm();
  if (radius <= Scalar(0) || gn == Scalar(0)) return cp;

  const Scalar fro = A.norm();
  auto declined = [&]() {
    TangentialSolution<Scalar> s = cp;
    s.fallback = true;
    return s;
  };

  const auto [lam_min, q_min] = min_eigenpair(A);
  (void)q_min;
  if (lam_min < -Scalar(1e-10) * std::max(Scalar(1), fro)) return declined();  // indefinite model

  // Min-norm Newton point; reject when the linear term escapes range(A).
  Eigen::CompleteOrthogonalDecomposition<MatrixX<Scalar>> cod(A);
  VectorX<Scalar> u_newton = cod.solve(-g);
  if ((A * u_newton + g).norm() > Scalar(1e-8) * std::max(Scalar(1), gn)) return declined();

  TangentialSolution<Scalar> sol;
  sol.solver_used = TrsMethod::dogleg;
  if (u_newton.norm() <= radius) {
    sol.u = std::move(u_newton);
    sol.boundary_active = false;
    sol.model_reduction = model_value<Scalar>(A, g, sol.u);
    return sol;
  }

  const Scalar curvature = g.dot(A * g);
  if (curvature <= Scalar(0)) return declined();
  VectorX<Scalar> u_c = -(gn * gn / curvature) * g;
  if (u_c.norm() >= radius) return cp;  // steepest-descent leg already hits the boundary

  VectorX<Scalar> dir = u_newton - u_c;
  auto [t1, t2] = boundary_roots<Scalar>(u_c, dir, radius);
  const Scalar tau = std::max(t1, t2);  // forward intersection along the second leg
  sol.u = u_c + tau * dir;
  sol.boundary_active = true;
  sol.model_reduction = model_value<Scalar>(A, g, sol.u);
  return sol;
}

}  // namespace detail

/// Solves the tangential trust-region subproblem. Every method returns a step
/// at least as good as the Cauchy point (verified by evaluating both).
template <typename Scalar>
TangentialSolution<Scalar> solve_tangential(const MatrixX<Scalar>& A, const VectorRef<Scalar>& g,
                                            Scalar radius, TrsMethod method, Scalar norm_B,
                                            Scalar tol = Scalar(1e-8)) {
  if (radius < Scalar(0)) throw std::invalid_argument("solve_tangential: negative radius");
  TangentialSolution<Scalar> cp = cauchy_point<Scalar>(A, g, norm_B, radius);
  if (method == TrsMethod::cauchy) return cp;

  TangentialSolution<Scalar> sol = (method == TrsMethod::exact)
                                       ? detail::solve_exact<Scalar>(A, g, radius, tol)
                                       : detail::solve_dogleg<Scalar>(A, g, norm_B, radius);
  // The boundary equation is solved to a relative tolerance; snap boundary
  // solutions onto the sphere so ||u|| <= radius and complementarity hold to
  // rounding.
  const Scalar un = sol.u.norm();
  if (un > radius || (sol.boundary_active && un > Scalar(0))) {
    sol.u *= radius / un;
    sol.model_reduction = model_value<Scalar>(A, g, sol.u);
  }
  if (sol.model_reduction > cp.model_reduction) {
    cp.fallback = sol.fallback;
    return cp;
  }
  return sol;
}

}  // namespace trsqp
