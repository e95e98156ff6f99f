#pragma once

#include <optional>
#include <string>
#include <vector>

#include "trsqp/baseline.hpp"
#include "trsqp/bench.hpp"
#include "trsqp/solver.hpp"
#include "trsqp/trace_io.hpp"

namespace trsqp {

struct NoiseSpec {
  NoiseKind kind = NoiseKind::gaussian_corr;
  double sigma2 = 0;

  static NoiseSpec none() { return {NoiseKind::none, 0}; }
  static NoiseSpec gaussian(double sigma2) { return {NoiseKind::gaussian_corr, sigma2}; }
  static NoiseSpec subsample() { return {NoiseKind::subsample, 0}; }

  std::string label() const;
  /// Parses "none", "subsample", or a sigma^2 value like "1e-4".
  static NoiseSpec parse(const std::string& text);
};

struct SolverSpec {
  bool baseline = false;
  HessianKind hessian = HessianKind::Id;

  std::string label() const;  // "l1", "tr-id", "tr-sr1", "tr-esth", "tr-aveh"
  static SolverSpec parse(const std::string& text);
};

HessianKind parse_hessian_kind(const std::string& text);
std::string hessian_label(HessianKind kind);

/// Cartesian experiment grid; each cell runs seeds base_seed..base_seed+n-1.
struct ExperimentPlan {
  std::vector<std::string> problems;  // built-in names, or "logreg:<libsvm path>"
  std::vector<SolverSpec> solvers;
  std::vector<NoiseSpec> noise_levels;
  std::vector<BetaSchedule> schedules;
  int n_seeds = 5;
  std::uint64_t base_seed = 1;
  long max_iter = 100000;
  double kkt_tol = 1e-4;
  std::string output_dir = "trsqp_out";
  std::optional<TrsMethod> trsub_method;
  bool write_traces = true;
};

struct CellResult {
  std::string problem, solver, noise, beta;
  std::vector<double> final_kkt;  // per seed; NaN when the run failed
  std::vector<std::string> statuses;
  CaseProportions proportions;  // pooled over seeds
  long failures = 0;
};

struct PlanSummary {
  std::vector<CellResult> cells;
  long total_runs = 0;
  long failed_runs = 0;
};

/// Executes every cell (runs distributed over a worker pool capped by
/// TRSQP_THREADS), writes one trace CSV per run plus per-cell summary JSON and
/// case-proportion CSV files, and returns the in-memory summary. Output
/// content is a pure function of (plan, seeds).
PlanSummary run_plan(const ExperimentPlan& plan);

/// Resolves a problem spec string: a built-in name or "logreg:<path>".
ProblemInstance load_problem(const std::string& spec);

struct ProportionRecord {
  std::string problem, solver, noise, beta;
  CaseProportions counts;
};

std::vector<ProportionRecord> load_proportion_files(const std::string& dir);

/// Text grid of case proportions, rows (beta, solver) by columns (noise),
/// pooled over problems. Case-3 shares above 25% are starred; missing cells
/// render as an em-dash.
std::string render_case_table(const std::vector<ProportionRecord>& records);

/// Long-format CSV of per-seed final KKT residuals collected from the
/// summaries in `dir` (plot-ready boxplot data).
std::string render_final_kkt_csv(const std::string& dir);

struct CheckLine {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Per-iteration invariant battery over the built-in problems; one line per
/// invariant plus the post-hoc control-parameter bound check.
std::vector<CheckLine> run_invariant_suite();

}  // namespace trsqp
