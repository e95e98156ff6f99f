#include <filesystem>
#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "trsqp/experiment.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

trsqp::ExperimentPlan plan_from_json(const json& j) {
  trsqp::ExperimentPlan plan;
  if (j.contains("problems")) plan.problems = j["problems"].get<std::vector<std::string>>();
  if (j.contains("solvers")) {
    plan.solvers.clear();
    for (const auto& s : j["solvers"]) plan.solvers.push_back(trsqp::SolverSpec::parse(s));
  }
  if (j.contains("noise")) {
    plan.noise_levels.clear();
    for (const auto& n : j["noise"]) {
      if (n.is_number()) {
        plan.noise_levels.push_back(trsqp::NoiseSpec::gaussian(n.get<double>()));
      } else {
        plan.noise_levels.push_back(trsqp::NoiseSpec::parse(n.get<std::string>()));
      }
    }
  }
  if (j.contains("schedules")) {
    plan.schedules.clear();
    for (const auto& s : j["schedules"]) {
      plan.schedules.push_back(trsqp::BetaSchedule::parse(s.get<std::string>()));
    }
  }
  if (j.contains("seeds")) plan.n_seeds = j["seeds"].get<int>();
  if (j.contains("base_seed")) plan.base_seed = j["base_seed"].get<std::uint64_t>();
  if (j.contains("max_iter")) plan.max_iter = j["max_iter"].get<long>();
  if (j.contains("kkt_tol")) plan.kkt_tol = j["kkt_tol"].get<double>();
  if (j.contains("out")) plan.output_dir = j["out"].get<std::string>();
  if (j.contains("trsub")) {
    const std::string m = j["trsub"].get<std::string>();
    if (m == "cauchy") plan.trsub_method = trsqp::TrsMethod::cauchy;
    else if (m == "dogleg") plan.trsub_method = trsqp::TrsMethod::dogleg;
    else if (m == "exact") plan.trsub_method = trsqp::TrsMethod::exact;
    else if (m != "auto") throw std::invalid_argument("trsub must be cauchy|dogleg|exact|auto");
  }
  return plan;
}

std::optional<trsqp::TrsMethod> parse_trsub(const std::string& m) {
  if (m == "cauchy") return trsqp::TrsMethod::cauchy;
  if (m == "dogleg") return trsqp::TrsMethod::dogleg;
  if (m == "exact") return trsqp::TrsMethod::exact;
  if (m == "auto" || m.empty()) return std::nullopt;
  throw CLI::ValidationError("--trsub must be cauchy|dogleg|exact|auto");
}

int cmd_solve(const std::string& problem_spec, const std::string& solver, const std::string& hessian,
              const std::string& noise_text, const std::string& beta_text, std::uint64_t seed,
              long max_iter, double kkt_tol, const std::string& out_dir, const std::string& trsub) {
  const trsqp::ProblemInstance problem = trsqp::load_problem(problem_spec);
  trsqp::NoiseSpec noise = trsqp::NoiseSpec::parse(noise_text);
  const trsqp::NoiseModel nm{noise.kind, noise.sigma2, seed};
  trsqp::RunRecord rec;
  if (solver == "l1-baseline" || solver == "l1") {
    trsqp::BaselineConfig cfg;
    cfg.beta = trsqp::BetaSchedule::parse(beta_text);
    cfg.max_iter = max_iter;
    cfg.kkt_tol = kkt_tol;
    cfg.seed = seed;
    rec = trsqp::run_baseline(problem, nm, cfg);
  } else if (solver == "tr-stosqp" || solver == "tr") {
    trsqp::SolverConfig cfg;
    cfg.beta = trsqp::BetaSchedule::parse(beta_text);
    cfg.max_iter = max_iter;
    cfg.kkt_tol = kkt_tol;
    cfg.seed = seed;
    cfg.hessian = trsqp::parse_hessian_kind(hessian);
    cfg.trsub_method = parse_trsub(trsub);
    rec = trsqp::run(problem, nm, cfg);
  } else {
    std::cerr << "unknown solver '" << solver << "' (want tr-stosqp or l1-baseline)\n";
    return 2;
  }

  std::cout << "problem:        " << rec.problem_name << "\n"
            << "solver:         " << rec.solver_label << "\n"
            << "status:         " << trsqp::to_string(rec.status) << "\n"
            << "iterations:     " << rec.iterations() << "\n"
            << "final true KKT: " << trsqp::format_double(rec.final_true_kkt) << "\n"
            << "merit value:    " << trsqp::format_double(rec.rows.empty() ? 0.0 : rec.rows.back().mu)
            << "\n"
            << "merit raises:   " << rec.merit_increase_count << "\n"
            << "wall seconds:   " << rec.wall_seconds << "\n";
  if (!rec.error.empty()) std::cout << "error:          " << rec.error << "\n";
  if (!rec.invariant_violations.empty()) {
    std::cout << "invariant violations: " << rec.invariant_violations.size() << " (first: "
              << rec.invariant_violations.front() << ")\n";
  }
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    const std::string path = (fs::path(out_dir) / "solve.trace.csv").string();
    trsqp::write_trace_csv(rec, path);
    std::cout << "trace:          " << path << "\n";
  }
  return rec.status == trsqp::RunStatus::failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TR-StoSQP: trust-region stochastic SQP solver and benchmark harness"};
  app.require_subcommand(1);

  // -------- solve --------
  auto* solve = app.add_subcommand("solve", "run one solver instance on one problem");
  std::string problem = "quad12", solver = "tr-stosqp", hessian = "id", noise = "none";
  std::string beta = "const:0.5", out_dir, trsub = "auto", config_path;
  std::uint64_t seed = 1;
  long max_iter = 100000;
  double kkt_tol = 1e-4;
  solve->add_option("--problem", problem, "built-in name or logreg:<libsvm path>");
  solve->add_option("--solver", solver, "tr-stosqp | l1-baseline");
  solve->add_option("--hessian", hessian, "id | sr1 | esth | aveh");
  solve->add_option("--noise", noise, "none | subsample | <sigma^2>");
  solve->add_option("--beta", beta, "const:<beta> | pow:<s>");
  solve->add_option("--seed", seed, "RNG seed");
  solve->add_option("--max-iter", max_iter, "iteration budget");
  solve->add_option("--kkt-tol", kkt_tol, "stop when the true KKT residual falls below");
  solve->add_option("--out", out_dir, "directory for the trace CSV");
  solve->add_option("--trsub", trsub, "cauchy | dogleg | exact | auto");

  // -------- sweep --------
  auto* sweep = app.add_subcommand("sweep", "run an experiment plan (cartesian grid)");
  std::vector<std::string> sw_problems, sw_solvers, sw_noise, sw_beta, sw_hessians;
  int sw_seeds = -1;
  long sw_max_iter = -1;
  double sw_kkt_tol = -1;
  std::string sw_out, sw_trsub;
  sweep->add_option("--config", config_path, "JSON plan; flags override file values");
  sweep->add_option("--problem", sw_problems, "problem spec (repeatable)");
  sweep->add_option("--solver", sw_solvers, "tr-stosqp | l1-baseline (repeatable)");
  sweep->add_option("--hessian", sw_hessians, "Hessian kinds crossed with tr-stosqp (repeatable)");
  sweep->add_option("--noise", sw_noise, "noise spec (repeatable)");
  sweep->add_option("--beta", sw_beta, "beta schedule (repeatable)");
  sweep->add_option("--seeds", sw_seeds, "seeds per cell");
  sweep->add_option("--max-iter", sw_max_iter, "iteration budget");
  sweep->add_option("--kkt-tol", sw_kkt_tol, "stopping tolerance");
  sweep->add_option("--out", sw_out, "output directory");
  sweep->add_option("--trsub", sw_trsub, "cauchy | dogleg | exact | auto");

  // -------- report --------
  auto* report = app.add_subcommand("report", "render case-proportion table and boxplot data");
  std::string rp_dir = "trsqp_out";
  report->add_option("--out", rp_dir, "directory holding sweep outputs");

  // -------- check --------
  auto* check = app.add_subcommand("check", "run the per-iteration invariant suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      return cmd_solve(problem, solver, hessian, noise, beta, seed, max_iter, kkt_tol, out_dir, trsub);
    }
    if (sweep->parsed()) {
      trsqp::ExperimentPlan plan;
      plan.solvers.clear();
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw std::runtime_error("cannot open config '" + config_path + "'");
        plan = plan_from_json(json::parse(in));
      }
      if (!sw_problems.empty()) plan.problems = sw_problems;
      if (!sw_solvers.empty() || !sw_hessians.empty()) {
        std::vector<std::string> solvers = sw_solvers.empty()
                                               ? std::vector<std::string>{"tr-stosqp"}
                                               : sw_solvers;
        plan.solvers.clear();
        for (const std::string& s : solvers) {
          if (s == "tr-stosqp" || s == "tr") {
            const std::vector<std::string> kinds =
                sw_hessians.empty() ? std::vector<std::string>{"id"} : sw_hessians;
            for (const std::string& h : kinds) plan.solvers.push_back(trsqp::SolverSpec::parse("tr-" + h));
          } else {
            plan.solvers.push_back(trsqp::SolverSpec::parse(s));
          }
        }
      }
      if (!sw_noise.empty()) {
        plan.noise_levels.clear();
        for (const std::string& n : sw_noise) plan.noise_levels.push_back(trsqp::NoiseSpec::parse(n));
      }
      if (!sw_beta.empty()) {
        plan.schedules.clear();
        for (const std::string& b : sw_beta) plan.schedules.push_back(trsqp::BetaSchedule::parse(b));
      }
      if (sw_seeds > 0) plan.n_seeds = sw_seeds;
      if (sw_max_iter >= 0) plan.max_iter = sw_max_iter;
      if (sw_kkt_tol >= 0) plan.kkt_tol = sw_kkt_tol;
      if (!sw_out.empty()) plan.output_dir = sw_out;
      if (!sw_trsub.empty()) plan.trsub_method = parse_trsub(sw_trsub);

      const trsqp::PlanSummary summary = trsqp::run_plan(plan);
      std::cout << "cells: " << summary.cells.size() << ", runs: " << summary.total_runs
                << ", failed: " << summary.failed_runs << ", out: " << plan.output_dir << "\n";
      return summary.failed_runs == summary.total_runs && summary.total_runs > 0 ? 1 : 0;
    }
    if (report->parsed()) {
      const auto records = trsqp::load_proportion_files(rp_dir);
      std::cout << trsqp::render_case_table(records);
      const std::string kkt_csv = trsqp::render_final_kkt_csv(rp_dir);
      const std::string path = (fs::path(rp_dir) / "final_kkt.csv").string();
      std::ofstream out(path, std::ios::binary);
      out << kkt_csv;
      std::cout << "boxplot data: " << path << "\n";
      return 0;
    }
    if (check->parsed()) {
      const auto lines = trsqp::run_invariant_suite();
      bool all = true;
      for (const auto& line : lines) {
        std::cout << (line.pass ? "PASS" : "FAIL") << "  " << line.name;
        if (!line.detail.empty()) std::cout << "  [" << line.detail << "]";
        std::cout << "\n";
        all = all && line.pass;
      }
      std::cout << (all ? "all invariants hold" : "invariant violations detected") << "\n";
      return all ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
