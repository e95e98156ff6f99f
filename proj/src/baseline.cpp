#include "trsqp/baseline.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

namespace trsqp {

Vector newton_kkt_step(const ConstraintFactorization<double>& fac, const Vector& c,
                       const Vector& gbar) {
  return normal_direction<double>(fac, c) - project_null<double>(fac, gbar);
}

double projected_stepsize(double beta_k, double reduction_ratio) {
  if (!(beta_k > 0)) throw std::invalid_argument("projected_stepsize: beta_k must be positive");
  return std::clamp(reduction_ratio, beta_k, beta_k + beta_k * beta_k);
}

RunRecord run_baseline(const ProblemInstance& problem, const NoiseModel& noise,
                       const BaselineConfig& config) {
  if (!(config.nu_init > 0) || !(config.nu_factor > 1) || config.max_iter < 0) {
    throw std::invalid_argument("run_baseline: invalid configuration");
  }

  const auto t_start = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.problem_name = problem.name;
  rec.solver_label = "l1-baseline";
  rec.seed = config.seed;
  rec.zeta = 0;
  rec.beta_max = config.beta.beta_max;
  {
    std::ostringstream os;
    os << "problem=" << problem.name << ";solver=l1-baseline;noise=" << int(noise.kind)
       << ";sigma2=" << noise.sigma2 << ";beta=" << config.beta.label()
       << ";max_iter=" << config.max_iter << ";kkt_tol=" << config.kkt_tol << ";seed=" << config.seed;
    rec.config_echo = os.str();
  }

  OracleStreams streams(config.seed);
  const LipschitzEstimates lip = estimate_lipschitz(problem, problem.x0, config.lipschitz_probes,
                                                    streams.probing, config.lipschitz_delta);
  rec.L_grad = lip.L_grad;
  rec.L_jac = lip.L_jac;

  double nu = config.nu_init;
  Vector x = problem.x0;

  for (long k = 0;; ++k) {
    const auto t_iter = std::chrono::steady_clock::now();
    Vector c, g_true;
    Matrix G;
    try {
      c = problem.constraint(x);
      G = problem.constraint_jac(x);
      g_true = problem.objective_grad(x);
    } catch (const std::exception& e) {
      rec.status = RunStatus::failed;
      rec.error = "iteration " + std::to_string(k) + ": oracle failure: " + e.what();
      break;
    }

    ConstraintFactorization<double> fac;
    try {
      fac = factorize<double>(G);
    } catch (const RankDeficiencyError& e) {
      rec.status = RunStatus::failed;
      rec.error = "iteration " + std::to_string(k) + ": " + e.what();
      break;
    }
    rec.min_gram_eig = std::min(rec.min_gram_eig, fac.gram_eig_min);
    rec.max_gram_eig = std::max(rec.max_gram_eig, fac.gram_eig_max);

    const Vector lambda_true = ls_multiplier<double>(fac, g_true);
    const double opt_true = (g_true + G.transpose() * lambda_true).norm();
    const double feas = c.norm();
    const double true_kkt = std::hypot(opt_true, feas);
    rec.final_true_kkt = true_kkt;

    if (true_kkt <= config.kkt_tol) {
      rec.status = RunStatus::converged;
      break;
    }
    if (k >= config.max_iter) {
      rec.status = RunStatus::budget_exhausted;
      break;
    }

    const GradientEstimate ge = sample_gradient(noise, problem, x, streams.gradient);
    const Vector lambda_bar = ls_multiplier<double>(fac, ge.gbar);
    const Vector grad_lag = ge.gbar + G.transpose() * lambda_bar;
    const double opt_est = grad_lag.norm();
    const double est_kkt = std::hypot(opt_est, feas);
    if (est_kkt == 0.0) {
      rec.status = RunStatus::zero_estimated_residual;
      break;
    }

    const Vector dx = newton_kkt_step(fac, c, ge.gbar);
    const double dx_norm2 = dx.squaredNorm();
    if (dx_norm2 == 0.0) {
      rec.status = RunStatus::zero_estimated_residual;
      break;
    }

    // l1 model reduction at the exact Newton step, affine and increasing in
    // the penalty parameter. The penalty is raised geometrically until the
    // reduction covers half the weighted constraint violation.
    const double c_l1 = c.lpNorm<1>();
    const double residual_l1 = (c + G * dx).lpNorm<1>();  // ~0 for the exact step
    const double q_lin = ge.gbar.dot(dx) + 0.5 * dx_norm2;
    auto model_reduction = [&](double penalty) { return -q_lin + penalty * (c_l1 - residual_l1); };
    long raises = 0;
    while (model_reduction(nu) < 0.5 * nu * c_l1 && raises < 1000000) {
      nu *= config.nu_factor;
      ++raises;
    }
    if (raises >= 1000000) {
      rec.status = RunStatus::failed;
      rec.error = "iteration " + std::to_string(k) + ": l1 penalty cap reached";
      break;
    }
    if (raises > 0) {
      rec.merit_increase_count += raises;
      rec.last_merit_increase_iter = k;
    }

    const double beta_k = config.beta(k);
    const double ratio = beta_k * model_reduction(nu) / ((lip.L_grad + nu * lip.L_jac) * dx_norm2);
    const double stepsize = projected_stepsize(beta_k, ratio);

    if (!(stepsize >= beta_k && stepsize <= beta_k + beta_k * beta_k)) {
      rec.invariant_violations.push_back(std::to_string(k) + ": stepsize escapes projection interval");
    }

    IterationRow row;
    row.k = k;
    row.true_kkt = true_kkt;
    row.est_kkt = est_kkt;
    row.feas = feas;
    row.opt = opt_est;
    row.delta = stepsize;  // stepsize in place of a radius
    row.delta_feas = 0;
    row.delta_opt = 0;
    row.gamma = 1;
    row.radius_case = 0;
    row.mu = nu;
    row.norm_B = 1;
    row.alpha = stepsize;
    row.beta = beta_k;
    row.norm_G = fac.norm_G();
    row.wall_ns =
        std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t_iter)
            .count();
    rec.rows.push_back(row);

    x += stepsize * dx;
  }

  rec.x_final = x;
  rec.wall_seconds =
      std::chrono::duration_cast<std::chrono::duration<double>>(std::chrono::steady_clock::now() -
                                                                t_start)
          .count();
  return rec;
}

}  // namespace trsqp
