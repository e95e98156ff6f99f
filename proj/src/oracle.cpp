#include "trsqp/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace trsqp {

GradientEstimate sample_gradient(const NoiseModel& model, const ProblemInstance& problem,
                                 const Vector& x, RngStream& rng) {
  if (!x.allFinite()) throw std::invalid_argument("sample_gradient: non-finite iterate");
  switch (model.kind) {
    case NoiseKind::none:
      return {problem.objective_grad(x), std::nullopt};
    case NoiseKind::gaussian_corr: {
      if (model.sigma2 < 0) {
        throw std::invalid_argument("sample_gradient: sigma2 must be nonnegative");
      }
      // sigma*(eps0*ones + eps) has covariance sigma2*(1 1^T + I); this avoids
      // a Cholesky factor of the correlated covariance.
      const double sigma = std::sqrt(model.sigma2);
      const double eps0 = rng.normal();
      Vector g = problem.objective_grad(x);
      for (Index i = 0; i < g.size(); ++i) g(i) += sigma * (eps0 + rng.normal());
      return {std::move(g), std::nullopt};
    }
    case NoiseKind::subsample: {
      if (!problem.is_finite_sum()) {
        throw CapabilityError("sample_gradient: problem '" + problem.name +
                              "' has no finite-sum components");
      }
      const Index id = rng.uniform_index(problem.num_components);
      return {problem.component_grad(x, id), id};
    }
  }
  throw std::logic_error("sample_gradient: unknown noise kind");
}

Matrix sample_hessian(const NoiseModel& model, const ProblemInstance& problem, const Vector& x,
                      RngStream& rng, std::optional<Index> paired_sample) {
  switch (model.kind) {
    case NoiseKind::none:
    case NoiseKind::gaussian_corr: {
      if (!problem.has_objective_hess()) {
        throw CapabilityError("sample_hessian: problem '" + problem.name +
                              "' exposes no Hessian oracle");
      }
      Matrix h = problem.objective_hess(x);
      if (model.kind == NoiseKind::gaussian_corr && model.sigma2 > 0) {
        const double sigma = std::sqrt(model.sigma2);
        for (Index i = 0; i < h.rows(); ++i) {
          for (Index j = i; j < h.cols(); ++j) {
            const double e = sigma * rng.normal();
            h(i, j) += e;
            if (j != i) h(j, i) = h(i, j);
          }
        }
      }
      return h;
    }
    case NoiseKind::subsample: {
      if (!problem.component_hess) {
        throw CapabilityError("sample_hessian: problem '" + problem.name +
                              "' has no component Hessians");
      }
      const Index id = paired_sample ? *paired_sample : rng.uniform_index(problem.num_components);
      return problem.component_hess(x, id);
    }
  }
  throw std::logic_error("sample_hessian: unknown noise kind");
}

LipschitzEstimates estimate_lipschitz(const ProblemInstance& problem, const Vector& x0, int n_probe,
                                      RngStream& rng, double probe_radius) {
  if (n_probe < 2) throw std::invalid_argument("estimate_lipschitz: n_probe must be >= 2");
  const Vector g0 = problem.objective_grad(x0);
  const Matrix G0 = problem.constraint_jac(x0);
  double L_grad = 0;
  double L_jac = 0;
  for (int p = 0; p < n_probe; ++p) {
    Vector dir = rng.normal_vector(problem.dim_x);
    const double dn = dir.norm();
    if (dn == 0) continue;
    dir /= dn;
    const Vector xp = x0 + probe_radius * dir;
    L_grad = std::max(L_grad, (problem.objective_grad(xp) - g0).norm() / probe_radius);
    const Matrix dG = problem.constraint_jac(xp) - G0;
    const double op_norm =
        std::sqrt(std::max(0.0, Eigen::SelfAdjointEigenSolver<Matrix>(dG * dG.transpose(),
                                                                      Eigen::EigenvaluesOnly)
                                    .eigenvalues()
                                    .maxCoeff()));
    L_jac = std::max(L_jac, op_norm / probe_radius);
  }
  return {std::max(L_grad, 1e-3), std::max(L_jac, 1e-3)};
}

}  // namespace trsqp
