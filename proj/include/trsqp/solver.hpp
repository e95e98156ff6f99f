#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "trsqp/control.hpp"
#include "trsqp/hessian.hpp"
#include "trsqp/oracle.hpp"
#include "trsqp/problem.hpp"
#include "trsqp/trsub.hpp"
#include "trsqp/types.hpp"

namespace trsqp {

/// Radius-related input sequence {beta_k} with beta_k in (0, beta_max].
/// Power schedules use beta_0 = min(1, beta_max) since k^{-s} is undefined at
/// k = 0, and beta_max = 1 so that k^{-s} <= beta_max for all k >= 1.
struct BetaSchedule {
  enum class Kind { constant, power };
  Kind kind = Kind::constant;
  double value = 0.5;  // beta for constant schedules, exponent s for power
  double beta_max = 0.5;

  static BetaSchedule constant(double beta) { return {Kind::constant, beta, beta}; }
  static BetaSchedule power(double s) { return {Kind::power, s, 1.0}; }

  double operator()(long k) const {
    if (kind == Kind::constant) return value;
    if (k == 0) return std::min(1.0, beta_max);
    return std::pow(double(k), -value);
  }

  std::string label() const;
  /// Parses "const:<beta>" or "pow:<s>".
  static BetaSchedule parse(const std::string& text);
};

struct SolverConfig {
  double zeta = 10.0;
  double mu_init = 1.0;
  double rho = 1.5;
  BetaSchedule beta = BetaSchedule::constant(0.5);
  long max_iter = 100000;
  double kkt_tol = 1e-4;
  HessianKind hessian = HessianKind::Id;
  std::optional<TrsMethod> trsub_method;  // default: exact for d <= 200, cauchy above
  double trsub_tol = 1e-8;
  std::uint64_t seed = 0;
  int lipschitz_probes = 50;
  double lipschitz_delta = 0.1;
};

struct IterationRow {
  long k = 0;
  double true_kkt = 0;
  double est_kkt = 0;
  double feas = 0;
  double opt = 0;
  double delta = 0;
  double delta_feas = 0;
  double delta_opt = 0;
  double gamma = 1;
  int radius_case = 0;  // 1/2/3 radius branches; 0 for the line-search baseline
  double mu = 0;
  double norm_B = 0;
  long long wall_ns = 0;
  // Diagnostics kept out of the trace CSV; consumed by the post-hoc
  // parameter-bound validation.
  double eta1 = 0, eta2 = 0, alpha = 0, tau = 0, beta = 0, norm_G = 0;
};

enum class RunStatus { converged, budget_exhausted, zero_estimated_residual, failed };
std::string to_string(RunStatus status);

struct RunRecord {
  std::vector<IterationRow> rows;
  RunStatus status = RunStatus::budget_exhausted;
  std::string error;

  std::string problem_name;
  std::string solver_label;  // "tr-stosqp" or "l1-baseline"
  std::string config_echo;
  std::uint64_t seed = 0;
  double zeta = 0, beta_max = 0;

  Vector x_final;
  double final_true_kkt = std::numeric_limits<double>::quiet_NaN();
  double L_grad = 0, L_jac = 0;
  double wall_seconds = 0;

  // Observed per-run extrema (post-hoc parameter-bound checks).
  double min_gram_eig = std::numeric_limits<double>::infinity();
  double max_gram_eig = 0;
  double max_norm_B = 0;
  double max_tau = 0;

  long merit_increase_count = 0;
  long last_merit_increase_iter = -1;
  long dogleg_fallbacks = 0;
  long sr1_skips = 0;
  std::vector<std::string> invariant_violations;

  long iterations() const { return static_cast<long>(rows.size()); }
};

/// Predicted reduction of the l2 merit model:
/// gbar'dx + 0.5 dx'B dx + mu*(||c + G dx|| - ||c||).
double predicted_reduction(const Vector& gbar, const Matrix& B, double mu, const Vector& c,
                           const Matrix& G, const Vector& dx);

struct MeritState {
  double mu = 1.0;
  long n_increases = 0;
  long last_increase_iter = -1;
};

/// Multiplies mu by rho until pred(mu) <= bound. pred must be non-increasing
/// in mu (it is affine with slope -gamma*||c|| <= 0); a cap of 1e6 increases
/// guards floating-point stagnation.
MeritState update_merit(MeritState ms, double rho, const std::function<double(double)>& pred,
                        double bound, long iter);

/// Runs the trust-region stochastic SQP loop.
RunRecord run(const ProblemInstance& problem, const NoiseModel& noise, const SolverConfig& config);

struct ControlBoundCheck {
  bool ok = true;
  std::string detail;
  double eta_min = 0, eta_max = 0, alpha_l = 0, alpha_u = 0;
};

/// Verifies eta_min <= eta2 <= eta1 <= eta_max and alpha in
/// [alpha_l*beta, alpha_u*beta] on every recorded iteration, with the bound
/// constants built from the run's observed extrema.
ControlBoundCheck validate_control_bounds(const RunRecord& rec);

}  // namespace trsqp
