#pragma once

#include <cstdint>

#include "trsqp/geometry.hpp"
#include "trsqp/oracle.hpp"
#include "trsqp/problem.hpp"
#include "trsqp/solver.hpp"

namespace trsqp {

/// Line-search comparator: B = I, exact SQP subproblem solve, stepsize by
/// projecting a merit-decrease ratio into [beta_k, beta_k + beta_k^2].
struct BaselineConfig {
  BetaSchedule beta = BetaSchedule::constant(0.5);
  double nu_init = 1.0;        // l1 penalty parameter
  double nu_factor = 1.5;      // raise factor when the model-reduction test fails
  long max_iter = 100000;
  double kkt_tol = 1e-4;       // shared stopping rule with the trust-region solver
  std::uint64_t seed = 0;
  int lipschitz_probes = 50;
  double lipschitz_delta = 0.1;
};

/// Newton-KKT direction for B = I: dx = -P gbar + v, so G dx = -c exactly and
/// P dx = -P gbar.
Vector newton_kkt_step(const ConstraintFactorization<double>& fac, const Vector& c,
                       const Vector& gbar);

/// Projection of the candidate ratio into [beta_k, beta_k + beta_k^2].
double projected_stepsize(double beta_k, double reduction_ratio);

RunRecord run_baseline(const ProblemInstance& problem, const NoiseModel& noise,
                       const BaselineConfig& config);

}  // namespace trsqp
