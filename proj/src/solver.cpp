#include "trsqp/solver.hpp"

#include <chrono>
#include <sstream>

#include "trsqp/geometry.hpp"
#include "trsqp/relax.hpp"
#include "trsqp/spectrum.hpp"

namespace trsqp {

std::string BetaSchedule::label() const {
  std::ostringstream os;
  if (kind == Kind::constant) {
    os << "const:" << value;
  } else {
    os << "pow:" << value;
  }
  return os.str();
}

BetaSchedule BetaSchedule::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw std::invalid_argument("beta schedule must be 'const:<beta>' or 'pow:<s>', got '" + text + "'");
  }
  const std::string head = text.substr(0, colon);
  const double v = std::stod(text.substr(colon + 1));
  if (head == "const") {
    if (!(v > 0)) throw std::invalid_argument("constant beta must be positive");
    return constant(v);
  }
  if (head == "pow") {
    if (!(v > 0)) throw std::invalid_argument("power exponent must be positive");
    return power(v);
  }
  throw std::invalid_argument("unknown beta schedule kind '" + head + "'");
}

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::converged:
      return "converged";
    case RunStatus::budget_exhausted:
      return "budget_exhausted";
    case RunStatus::zero_estimated_residual:
      return "zero_estimated_residual";
    case RunStatus::failed:
      return "failed";
  }
  return "unknown";
}

double predicted_reduction(const Vector& gbar, const Matrix& B, double mu, const Vector& c,
                           const Matrix& G, const Vector& dx) {
  return gbar.dot(dx) + 0.5 * dx.dot(B * dx) + mu * ((c + G * dx).norm() - c.norm());
}

MeritState update_merit(MeritState ms, double rho, const std::function<double(double)>& pred,
                        double bound, long iter) {
  constexpr long kMaxIncreases = 1000000;
  long increases = 0;
  while (pred(ms.mu) > bound) {
    if (increases >= kMaxIncreases) {
      throw std::runtime_error("update_merit: merit parameter cap reached (1e6 increases)");
    }
    ms.mu *= rho;
    ++increases;
  }
  if (increases > 0) {
    ms.n_increases += increases;
    ms.last_increase_iter = iter;
  }
  return ms;
}

namespace detail {

struct InvariantChecker {
  RunRecord* rec;

  void expect(bool ok, long k, const std::string& what) {
    if (!ok) rec->invariant_violations.push_back(std::to_string(k) + ": " + what);
  }
};

std::string echo_config(const ProblemInstance& problem, const NoiseModel& noise,
                        const SolverConfig& config) {
  std::ostringstream os;
  os << "problem=" << problem.name << ";solver=tr-stosqp;hessian=" << int(config.hessian)
     << ";noise=" << int(noise.kind) << ";sigma2=" << noise.sigma2 << ";beta=" << config.beta.label()
     << ";zeta=" << config.zeta << ";rho=" << config.rho << ";mu_init=" << config.mu_init
     << ";max_iter=" << config.max_iter << ";kkt_tol=" << config.kkt_tol << ";seed=" << config.seed;
  return os.str();
}

}  // namespace detail

RunRecord run(const ProblemInstance& problem, const NoiseModel& noise, const SolverConfig& config) {
  if (!(config.zeta > 0) || !(config.rho > 1) || !(config.mu_init > 0) || config.max_iter < 0) {
    throw std::invalid_argument("run: invalid solver configuration");
  }
  HessianStrategy strategy(config.hessian, problem.dim_x);
  if (strategy.needs_hessian_samples() &&
      !(noise.kind == NoiseKind::subsample ? static_cast<bool>(problem.component_hess)
                                           : problem.has_objective_hess())) {
    throw CapabilityError("run: Hessian strategy requires a Hessian oracle on problem '" +
                          problem.name + "'");
  }
  if (strategy.needs_hessian_samples() && !problem.has_constraint_hess()) {
    throw CapabilityError("run: Hessian strategy requires constraint Hessians on problem '" +
                          problem.name + "'");
  }

  const auto t_start = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.problem_name = problem.name;
  rec.solver_label = "tr-stosqp";
  rec.seed = config.seed;
  rec.zeta = config.zeta;
  rec.beta_max = config.beta.beta_max;
  rec.config_echo = detail::echo_config(problem, noise, config);
  detail::InvariantChecker check{&rec};

  OracleStreams streams(config.seed);
  const LipschitzEstimates lip = estimate_lipschitz(problem, problem.x0, config.lipschitz_probes,
                                                    streams.probing, config.lipschitz_delta);
  rec.L_grad = lip.L_grad;
  rec.L_jac = lip.L_jac;

  const TrsMethod method =
      config.trsub_method.value_or(problem.dim_x <= 200 ? TrsMethod::exact : TrsMethod::cauchy);
  const double alpha_u = 1.0 / (6.0 * config.zeta * config.beta.beta_max);

  MeritState merit{config.mu_init, 0, -1};
  Vector x = problem.x0;
  rec.rows.reserve(static_cast<size_t>(std::min<long>(config.max_iter, 1 << 20)));

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

    // Reporting and the stopping rule use the true KKT residual, evaluated at
    // the least-squares multiplier of the exact gradient.
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

    // Step 1: Hessian approximation and control parameters, before the draw.
    const Matrix B = strategy.produce(k);
    const double norm_B = operator_norm_estimate<double>(B);
    const double beta_k = config.beta(k);
    const ControlParams<double> cp = control_params<double>(
        config.zeta, beta_k, config.beta.beta_max, norm_B, fac.norm_G(), lip.L_grad, lip.L_jac, merit.mu);
    rec.max_norm_B = std::max(rec.max_norm_B, norm_B);
    rec.max_tau = std::max(rec.max_tau, cp.tau);

    // Step 2: gradient estimate, multiplier, estimated KKT residual.
    const GradientEstimate ge = sample_gradient(noise, problem, x, streams.gradient);
    const Vector lambda_bar = ls_multiplier<double>(fac, ge.gbar);
    const Vector grad_lag = ge.gbar + G.transpose() * lambda_bar;  // = P gbar
    const double opt_est = grad_lag.norm();
    const double est_kkt = std::hypot(opt_est, feas);
    if (est_kkt == 0.0) {
      rec.status = RunStatus::zero_estimated_residual;
      break;
    }

    // Step 3: radius rule.
    const auto [delta, radius_case] = radius<double>(cp, est_kkt);

    // Step 4: radius split and trial step.
    const RadiusSplit<double> split = split_radius<double>(delta, feas, opt_est);
    StepDecomposition<double> step;
    try {
      step = assemble_step<double>(fac, ge.gbar, c, B, split, method, norm_B, config.trsub_tol);
    } catch (const std::exception& e) {
      rec.status = RunStatus::failed;
      rec.error = "iteration " + std::to_string(k) + ": " + e.what();
      break;
    }
    if (step.tangent.fallback) ++rec.dogleg_fallbacks;

    // Feed the strategy the information revealed by this iteration's draw.
    if (strategy.needs_hessian_samples()) {
      const Matrix h_obj = sample_hessian(noise, problem, x, streams.hessian, ge.sample_id);
      strategy.record(k, x, grad_lag, problem.lagrangian_hess(x, lambda_bar, h_obj));
    } else {
      strategy.record(k, x, grad_lag);
    }

    // Step 5: iterate update.
    const Vector x_next = x + step.trial;

    // Step 6: merit parameter update. Pred is affine in mu with slope
    // ||c + G dx|| - ||c|| = -gamma*||c|| <= 0; when the slope vanishes the
    // Cauchy reduction already satisfies the test and mu stays put.
    const double q_term = ge.gbar.dot(step.trial) + 0.5 * step.trial.dot(B * step.trial);
    const double slope = step.linearized_feas - feas;
    // The Rayleigh quotient of P B P along the projected gradient never
    // exceeds ||B||; taking the max keeps the reduction bound achievable when
    // the power-method estimate lags the true norm.
    double norm_B_eff = norm_B;
    if (opt_est > 0) {
      const Vector pg_dir = grad_lag / opt_est;  // already in ker(G), so P drops out
      norm_B_eff = std::max(norm_B, pg_dir.dot(B * pg_dir));
    }
    const double bound = -opt_est * split.delta_opt - 0.5 * feas * split.delta_feas +
                         0.5 * norm_B_eff * split.delta_opt * split.delta_opt +
                         norm_B_eff * split.delta_feas * split.delta_opt;
    const auto pred_fn = [&](double mu) { return q_term + mu * slope; };
    const long increases_before = merit.n_increases;
    if (slope < 0.0) {
      try {
        merit = update_merit(merit, config.rho, pred_fn, bound, k);
      } catch (const std::exception& e) {
        rec.status = RunStatus::failed;
        rec.error = "iteration " + std::to_string(k) + ": " + e.what();
        break;
      }
    }
    rec.merit_increase_count = merit.n_increases;
    if (merit.n_increases > increases_before) rec.last_merit_increase_iter = k;

    // Runtime invariants (recorded, not thrown; the trace is preserved).
    {
      const double dn = step.trial.norm();
      const double tiny = 1e-300;
      check.expect(dn <= delta * (1 + 1e-10) + tiny, k, "||dx|| exceeds trust-region radius");
      check.expect(std::abs(split.delta_feas * split.delta_feas + split.delta_opt * split.delta_opt -
                            delta * delta) <= 1e-12 * delta * delta + tiny,
                   k, "radius split violates delta_feas^2 + delta_opt^2 = delta^2");
      const double feas_tol = 1e-10 * feas + 1e-10 * fac.norm_G() * dn + tiny;
      check.expect(std::abs(step.linearized_feas - (1 - step.gamma) * feas) <= feas_tol, k,
                   "linearized feasibility identity ||c+G dx|| = (1-gamma)||c||");
      const double red = step.tangent.model_reduction;
      const double lemma_bound = -opt_est * split.delta_opt +
                                 0.5 * norm_B_eff * split.delta_opt * split.delta_opt;
      check.expect(red <= lemma_bound + 1e-10 * (1 + std::abs(red)), k,
                   "Cauchy reduction bound violated");
      check.expect(pred_fn(merit.mu) <= bound + 1e-10 * (1 + std::abs(bound)), k,
                   "merit reduction condition not met at loop exit");
      check.expect(cp.eta2 <= cp.eta1, k, "eta2 > eta1");
      check.expect(step.gamma >= 0 && step.gamma <= 1, k, "gamma outside [0,1]");
      const double orth = std::abs(dn * dn - step.normal.squaredNorm() - step.tangential.squaredNorm());
      check.expect(orth <= 1e-10 * std::max(dn * dn, tiny), k, "normal/tangential not orthogonal");
      check.expect(step.normal.norm() <= split.delta_feas * (1 + 1e-10) + tiny, k,
                   "normal step exceeds its radius share");
      check.expect(step.tangential.norm() <= split.delta_opt * (1 + 1e-10) + tiny, k,
                   "tangential step exceeds its radius share");
      check.expect(delta <= cp.eta1 * alpha_u * beta_k * est_kkt * (1 + 1e-12), k,
                   "radius-order bound delta = O(beta*||est KKT||) violated");
      check.expect((fac.G * step.tangential).norm() <=
                       1e-10 * std::max(1.0, fac.norm_G()) * std::max(step.tangent.u.norm(), tiny),
                   k, "tangential step leaves ker(G)");
    }

    IterationRow row;
    row.k = k;
    row.true_kkt = true_kkt;
    row.est_kkt = est_kkt;
    row.feas = feas;
    row.opt = opt_est;
    row.delta = delta;
    row.delta_feas = split.delta_feas;
    row.delta_opt = split.delta_opt;
    row.gamma = step.gamma;
    row.radius_case = radius_case;
    row.mu = merit.mu;
    row.norm_B = norm_B;
    row.eta1 = cp.eta1;
    row.eta2 = cp.eta2;
    row.alpha = cp.alpha;
    row.tau = cp.tau;
    row.beta = beta_k;
    row.norm_G = cp.norm_G;
    row.wall_ns =
        std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t_iter)
            .count();
    rec.rows.push_back(row);

    x = x_next;
  }

  rec.x_final = x;
  rec.sr1_skips = strategy.sr1_skip_count();
  rec.wall_seconds =
      std::chrono::duration_cast<std::chrono::duration<double>>(std::chrono::steady_clock::now() -
                                                                t_start)
          .count();
  return rec;
}

ControlBoundCheck validate_control_bounds(const RunRecord& rec) {
  ControlBoundCheck out;
  if (rec.solver_label != "tr-stosqp" || rec.rows.empty()) return out;
  const double kappa1 = rec.min_gram_eig;
  const double kappa2 = rec.max_gram_eig;
  const double kappa_B = rec.max_norm_B;
  const double tau_max = rec.max_tau;
  const double zeta = rec.zeta;
  const double beta_max = rec.beta_max;

  out.eta_max = 6.0 * zeta * beta_max / std::sqrt(kappa1);
  const double inv_kb = kappa_B > 0 ? 1.0 / kappa_B : std::numeric_limits<double>::infinity();
  out.eta_min = (11.0 / 12.0) * zeta * std::min(inv_kb, 6.0 * beta_max / std::sqrt(kappa2));
  out.alpha_u = 1.0 / (6.0 * zeta * beta_max);
  out.alpha_l = 1.0 / ((4.0 * out.eta_max * tau_max + 6.0 * zeta) * beta_max);

  const double slack = 1 + 1e-12;
  for (const IterationRow& row : rec.rows) {
    const bool eta_ok = out.eta_min <= row.eta2 * slack && row.eta2 <= row.eta1 * slack &&
                        row.eta1 <= out.eta_max * slack;
    const bool alpha_ok =
        out.alpha_l * row.beta <= row.alpha * slack && row.alpha <= out.alpha_u * row.beta * slack;
    if (!eta_ok || !alpha_ok) {
      out.ok = false;
      out.detail = "iteration " + std::to_string(row.k) + ": control parameters escape "
                   "the post-hoc bounds";
      return out;
    }
  }
  return out;
}

}  // namespace trsqp
