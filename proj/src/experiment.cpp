#include "trsqp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace trsqp {

std::string NoiseSpec::label() const {
  switch (kind) {
    case NoiseKind::none:
      return "none";
    case NoiseKind::subsample:
      return "subsample";
    case NoiseKind::gaussian_corr: {
      std::ostringstream os;
      os << "g" << sigma2;
      return os.str();
    }
  }
  return "?";
}

NoiseSpec NoiseSpec::parse(const std::string& text) {
  if (text == "none") return none();
  if (text == "subsample" || text == "sub") return subsample();
  std::string body = text;
  if (body.rfind("g", 0) == 0 && body.size() > 1 && (std::isdigit(body[1]) || body[1] == '.')) {
    body = body.substr(1);
  }
  try {
    const double s2 = std::stod(body);
    if (s2 < 0) throw std::invalid_argument("negative");
    return gaussian(s2);
  } catch (const std::exception&) {
    throw std::invalid_argument("noise spec must be 'none', 'subsample', or a sigma^2 value; got '" +
                                text + "'");
  }
}

HessianKind parse_hessian_kind(const std::string& text) {
  if (text == "id") return HessianKind::Id;
  if (text == "sr1") return HessianKind::SR1;
  if (text == "esth") return HessianKind::EstH;
  if (text == "aveh") return HessianKind::AveH;
  throw std::invalid_argument("unknown Hessian kind '" + text + "' (want id|sr1|esth|aveh)");
}

std::string hessian_label(HessianKind kind) {
  switch (kind) {
    case HessianKind::Id:
      return "id";
    case HessianKind::SR1:
      return "sr1";
    case HessianKind::EstH:
      return "esth";
    case HessianKind::AveH:
      return "aveh";
  }
  return "?";
}

std::string SolverSpec::label() const {
  return baseline ? "l1" : "tr-" + hessian_label(hessian);
}

SolverSpec SolverSpec::parse(const std::string& text) {
  if (text == "l1" || text == "l1-baseline" || text == "baseline") return {true, HessianKind::Id};
  if (text == "tr" || text == "tr-stosqp") return {false, HessianKind::Id};
  if (text.rfind("tr-", 0) == 0) return {false, parse_hessian_kind(text.substr(3))};
  throw std::invalid_argument("unknown solver spec '" + text +
                              "' (want l1-baseline, tr-stosqp, or tr-<hessian>)");
}

ProblemInstance load_problem(const std::string& spec) {
  if (spec.rfind("logreg:", 0) == 0) {
    const Dataset data = parse_libsvm(spec.substr(7));
    // Constraint data is generated once per dataset under a fixed seed so
    // that every solver and seed sees the same problem.
    return make_logreg_problem(data, 5, 7).problem;
  }
  return make_builtin_problem(spec);
}

namespace {

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.' || c == '_')) c = '-';
  }
  return s;
}

struct RunTask {
  size_t cell = 0;
  int seed_offset = 0;
  std::string problem_spec;
  SolverSpec solver;
  NoiseSpec noise;
  BetaSchedule beta;
  std::uint64_t seed = 0;
};

RunRecord execute_task(const ProblemInstance& problem, const RunTask& task, long max_iter,
                       double kkt_tol, std::optional<TrsMethod> trsub_method) {
  const NoiseModel noise{task.noise.kind, task.noise.sigma2, task.seed};
  if (task.solver.baseline) {
    BaselineConfig cfg;
    cfg.beta = task.beta;
    cfg.max_iter = max_iter;
    cfg.kkt_tol = kkt_tol;
    cfg.seed = task.seed;
    return run_baseline(problem, noise, cfg);
  }
  SolverConfig cfg;
  cfg.beta = task.beta;
  cfg.max_iter = max_iter;
  cfg.kkt_tol = kkt_tol;
  cfg.seed = task.seed;
  cfg.hessian = task.solver.hessian;
  cfg.trsub_method = trsub_method;
  return run(problem, noise, cfg);
}

int worker_count() {
  if (const char* env = std::getenv("TRSQP_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 2;
}

std::vector<double> quantiles(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  auto at = [&](double q) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    const double pos = q * double(values.size() - 1);
    const size_t lo = static_cast<size_t>(pos);
    const size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - double(lo)) * (values[hi] - values[lo]);
  };
  return {at(0.0), at(0.25), at(0.5), at(0.75), at(1.0)};
}

}  // namespace

PlanSummary run_plan(const ExperimentPlan& plan) {
  if (plan.problems.empty() || plan.solvers.empty() || plan.noise_levels.empty() ||
      plan.schedules.empty() || plan.n_seeds <= 0) {
    throw std::invalid_argument("run_plan: plan must enumerate at least one cell and seed");
  }
  fs::create_directories(plan.output_dir);

  // Problems are loaded once and shared read-only across runs.
  std::map<std::string, ProblemInstance> problems;
  for (const std::string& spec : plan.problems) {
    if (!problems.count(spec)) problems.emplace(spec, load_problem(spec));
  }
  for (const std::string& spec : plan.problems) {
    for (const NoiseSpec& noise : plan.noise_levels) {
      if (noise.kind == NoiseKind::subsample && !problems.at(spec).is_finite_sum()) {
        throw std::invalid_argument("run_plan: subsample noise requires a finite-sum problem, got '" +
                                    spec + "'");
      }
    }
  }

  // Deterministic cell enumeration: problem-major cartesian order.
  std::vector<RunTask> tasks;
  std::vector<CellResult> cells;
  for (const std::string& prob : plan.problems) {
    for (const SolverSpec& solver : plan.solvers) {
      for (const NoiseSpec& noise : plan.noise_levels) {
        for (const BetaSchedule& beta : plan.schedules) {
          CellResult cell;
          cell.problem = prob;
          cell.solver = solver.label();
          cell.noise = noise.label();
          cell.beta = beta.label();
          cell.final_kkt.resize(static_cast<size_t>(plan.n_seeds));
          cell.statuses.resize(static_cast<size_t>(plan.n_seeds));
          const size_t cell_idx = cells.size();
          cells.push_back(std::move(cell));
          for (int s = 0; s < plan.n_seeds; ++s) {
            tasks.push_back({cell_idx, s, prob, solver, noise, beta,
                             plan.base_seed + static_cast<std::uint64_t>(s)});
          }
        }
      }
    }
  }

  std::vector<RunRecord> records(tasks.size());
  std::atomic<size_t> next{0};
  const int n_workers = std::max(1, std::min<int>(worker_count(), static_cast<int>(tasks.size())));
  auto work = [&]() {
    for (size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1)) {
      const RunTask& t = tasks[i];
      try {
        records[i] = execute_task(problems.at(t.problem_spec), t, plan.max_iter, plan.kkt_tol,
                                  plan.trsub_method);
      } catch (const std::exception& e) {
        records[i].status = RunStatus::failed;
        records[i].error = e.what();
        records[i].problem_name = t.problem_spec;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < n_workers; ++w) pool.emplace_back(work);
  work();
  for (std::thread& th : pool) th.join();

  PlanSummary summary;
  summary.total_runs = static_cast<long>(tasks.size());
  summary.cells = std::move(cells);

  for (size_t i = 0; i < tasks.size(); ++i) {
    const RunTask& t = tasks[i];
    const RunRecord& rec = records[i];
    CellResult& cell = summary.cells[t.cell];
    const size_t s = static_cast<size_t>(t.seed_offset);
    cell.statuses[s] = rec.status == RunStatus::failed ? "failed: " + rec.error : to_string(rec.status);
    cell.final_kkt[s] = rec.status == RunStatus::failed ? std::numeric_limits<double>::quiet_NaN()
                                                        : rec.final_true_kkt;
    if (rec.status == RunStatus::failed) {
      ++cell.failures;
      ++summary.failed_runs;
    }
    const CaseProportions cp = case_proportions(rec);
    cell.proportions.n1 += cp.n1;
    cell.proportions.n2 += cp.n2;
    cell.proportions.n3 += cp.n3;

    if (plan.write_traces) {
      const std::string stem = sanitize(t.problem_spec) + "__" + sanitize(t.solver.label()) + "__" +
                               sanitize(t.noise.label()) + "__" + sanitize(t.beta.label()) +
                               "__seed" + std::to_string(t.seed);
      write_trace_csv(rec, (fs::path(plan.output_dir) / (stem + ".trace.csv")).string());
    }
  }

  for (const CellResult& cell : summary.cells) {
    const std::string stem = sanitize(cell.problem) + "__" + sanitize(cell.solver) + "__" +
                             sanitize(cell.noise) + "__" + sanitize(cell.beta);
    {
      ordered_json j;
      j["problem"] = cell.problem;
      j["solver"] = cell.solver;
      j["noise"] = cell.noise;
      j["beta"] = cell.beta;
      j["n_seeds"] = cell.final_kkt.size();
      j["statuses"] = cell.statuses;
      std::vector<double> finite;
      for (double v : cell.final_kkt) {
        if (std::isfinite(v)) finite.push_back(v);
      }
      std::vector<std::string> kkts;
      for (double v : cell.final_kkt) kkts.push_back(format_double(v));
      j["final_kkt"] = kkts;
      const std::vector<double> q = quantiles(finite);
      j["final_kkt_quantiles"] = {{"min", format_double(q[0])},
                                  {"q25", format_double(q[1])},
                                  {"median", format_double(q[2])},
                                  {"q75", format_double(q[3])},
                                  {"max", format_double(q[4])}};
      std::ofstream out(fs::path(plan.output_dir) / (stem + ".summary.json"), std::ios::binary);
      out << j.dump(2) << '\n';
    }
    if (cell.solver != "l1") {
      std::ofstream out(fs::path(plan.output_dir) / (stem + ".proportions.csv"), std::ios::binary);
      out << "problem,solver,noise,beta,n_case1,n_case2,n_case3,pct1,pct2,pct3\n";
      out << cell.problem << ',' << cell.solver << ',' << cell.noise << ',' << cell.beta << ','
          << cell.proportions.n1 << ',' << cell.proportions.n2 << ',' << cell.proportions.n3 << ','
          << format_double(cell.proportions.pct1()) << ',' << format_double(cell.proportions.pct2())
          << ',' << format_double(cell.proportions.pct3()) << '\n';
    }
  }
  return summary;
}

std::vector<ProportionRecord> load_proportion_files(const std::string& dir) {
  std::vector<ProportionRecord> records;
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() > 16 && name.substr(name.size() - 16) == ".proportions.csv") {
      paths.push_back(entry.path());
    }
  }
  std::sort(paths.begin(), paths.end());
  for (const fs::path& path : paths) {
    std::ifstream in(path);
    std::string header, line;
    std::getline(in, header);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream ls(line);
      ProportionRecord rec;
      std::string field;
      std::getline(ls, rec.problem, ',');
      std::getline(ls, rec.solver, ',');
      std::getline(ls, rec.noise, ',');
      std::getline(ls, rec.beta, ',');
      std::getline(ls, field, ',');
      rec.counts.n1 = std::stol(field);
      std::getline(ls, field, ',');
      rec.counts.n2 = std::stol(field);
      std::getline(ls, field, ',');
      rec.counts.n3 = std::stol(field);
      records.push_back(std::move(rec));
    }
  }
  return records;
}

std::string render_case_table(const std::vector<ProportionRecord>& records) {
  // Pool counts over problems; rows (beta, solver), columns noise.
  std::map<std::pair<std::string, std::string>, std::map<std::string, CaseProportions>> grid;
  std::vector<std::string> noises;
  for (const ProportionRecord& rec : records) {
    CaseProportions& cp = grid[{rec.beta, rec.solver}][rec.noise];
    cp.n1 += rec.counts.n1;
    cp.n2 += rec.counts.n2;
    cp.n3 += rec.counts.n3;
    if (std::find(noises.begin(), noises.end(), rec.noise) == noises.end()) {
      noises.push_back(rec.noise);
    }
  }
  std::sort(noises.begin(), noises.end());

  std::ostringstream os;
  os << "Case proportions (%) of the radius rule; case 3 above 25% is starred.\n";
  os << std::left;
  os.width(22);
  os << "beta / solver";
  for (const std::string& n : noises) {
    os.width(24);
    os << ("noise=" + n);
  }
  os << '\n';
  for (const auto& [key, row] : grid) {
    os.width(22);
    os << (key.first + " " + key.second);
    for (const std::string& n : noises) {
      std::ostringstream cellText;
      auto it = row.find(n);
      if (it == row.end() || it->second.total() == 0) {
        cellText << "—";
      } else {
        const CaseProportions& cp = it->second;
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.1f/%.1f/%.1f%s", cp.pct1(), cp.pct2(), cp.pct3(),
                      cp.pct3() > 25.0 ? " *" : "");
        cellText << buf;
      }
      os.width(24);
      os << cellText.str();
    }
    os << '\n';
  }
  return os.str();
}

std::string render_final_kkt_csv(const std::string& dir) {
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() > 13 && name.substr(name.size() - 13) == ".summary.json") {
      paths.push_back(entry.path());
    }
  }
  std::sort(paths.begin(), paths.end());
  std::ostringstream os;
  os << "problem,solver,noise,beta,seed_index,final_kkt,status\n";
  for (const fs::path& path : paths) {
    std::ifstream in(path);
    ordered_json j = ordered_json::parse(in);
    const auto& kkts = j.at("final_kkt");
    const auto& statuses = j.at("statuses");
    for (size_t s = 0; s < kkts.size(); ++s) {
      os << j.at("problem").get<std::string>() << ',' << j.at("solver").get<std::string>() << ','
         << j.at("noise").get<std::string>() << ',' << j.at("beta").get<std::string>() << ',' << s
         << ',' << kkts[s].get<std::string>() << ','
         << '"' << statuses[s].get<std::string>() << '"' << '\n';
    }
  }
  return os.str();
}

std::vector<CheckLine> run_invariant_suite() {
  // Violation substrings emitted by the solver loop, with display names for
  // the corresponding invariant statements.
  const std::vector<std::pair<std::string, std::string>> categories = {
      {"||dx|| exceeds trust-region radius", "trial step within trust region: ||dx|| <= delta"},
      {"radius split violates", "radius split identity: delta_feas^2 + delta_opt^2 = delta^2"},
      {"linearized feasibility identity", "feasibility identity: ||c+G dx|| = (1-gamma)||c||"},
      {"Cauchy reduction bound violated", "Cauchy reduction bound on the tangential model"},
      {"merit reduction condition not met", "merit reduction condition holds at loop exit"},
      {"eta2 > eta1", "control ordering: eta2 <= eta1"},
      {"gamma outside [0,1]", "relaxation factor gamma in [0,1]"},
      {"normal/tangential not orthogonal", "step orthogonality: ||dx||^2 = ||w||^2 + ||t||^2"},
      {"normal step exceeds its radius share", "normal step within its radius share"},
      {"tangential step exceeds its radius share", "tangential step within its radius share"},
      {"radius-order bound", "radius order: delta = O(beta * est KKT)"},
      {"tangential step leaves ker(G)", "tangential step stays in ker(G)"},
  };
  std::map<std::string, std::vector<std::string>> hits;
  for (const auto& [c, display] : categories) hits[c] = {};
  long total_runs = 0, failed_runs = 0, merit_nonmonotone = 0;
  std::vector<std::string> control_bound_failures;
  std::vector<std::string> failures;

  auto consume = [&](const RunRecord& rec, const std::string& tag) {
    ++total_runs;
    if (rec.status == RunStatus::failed) {
      ++failed_runs;
      failures.push_back(tag + ": " + rec.error);
      return;
    }
    for (const std::string& v : rec.invariant_violations) {
      for (const auto& [c, display] : categories) {
        if (v.find(c) != std::string::npos) hits[c].push_back(tag + " @" + v);
      }
    }
    double prev_mu = 0;
    for (const IterationRow& row : rec.rows) {
      if (row.mu < prev_mu) ++merit_nonmonotone;
      prev_mu = row.mu;
    }
    const ControlBoundCheck cb = validate_control_bounds(rec);
    if (!cb.ok) control_bound_failures.push_back(tag + ": " + cb.detail);
  };

  const std::vector<NoiseSpec> noises = {NoiseSpec::none(), NoiseSpec::gaussian(1e-4),
                                         NoiseSpec::gaussian(1e-1)};
  const std::vector<BetaSchedule> schedules = {BetaSchedule::constant(0.5), BetaSchedule::power(0.8)};
  const std::vector<HessianKind> kinds = {HessianKind::Id, HessianKind::SR1, HessianKind::EstH,
                                          HessianKind::AveH};
  for (const std::string& name : builtin_problem_names()) {
    const ProblemInstance problem = make_builtin_problem(name);
    for (HessianKind kind : kinds) {
      for (const NoiseSpec& noise : noises) {
        for (const BetaSchedule& beta : schedules) {
          SolverConfig cfg;
          cfg.hessian = kind;
          cfg.beta = beta;
          cfg.max_iter = 400;
          cfg.kkt_tol = 1e-10;
          cfg.seed = 17;
          const NoiseModel nm{noise.kind, noise.sigma2, cfg.seed};
          consume(run(problem, nm, cfg),
                  name + "/" + hessian_label(kind) + "/" + noise.label() + "/" + beta.label());
        }
      }
    }
  }

  // Single-sample path over a synthetic finite-sum problem.
  {
    RngStream rng(99, 5);
    const Index n = 40, d = 8;
    Dataset data;
    data.n_samples = n;
    data.dim = d;
    data.features = Matrix(n, d);
    data.labels = Vector(n);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < d; ++j) data.features(i, j) = rng.normal();
      data.labels(i) = rng.normal() > 0 ? 1 : -1;
    }
    const LogRegProblem lp = make_logreg_problem(data, 3, 11);
    for (HessianKind kind : kinds) {
      SolverConfig cfg;
      cfg.hessian = kind;
      cfg.beta = BetaSchedule::power(0.8);
      cfg.max_iter = 400;
      cfg.kkt_tol = 1e-10;
      cfg.seed = 23;
      const NoiseModel nm{NoiseKind::subsample, 0, cfg.seed};
      consume(run(lp.problem, nm, cfg), "logreg-synth/" + hessian_label(kind) + "/subsample/pow:0.8");
    }
  }

  std::vector<CheckLine> lines;
  auto push = [&](const std::string& name, bool pass, const std::string& detail) {
    lines.push_back({name, pass, detail});
  };
  push("runs complete without solver failure", failed_runs == 0,
       failed_runs == 0 ? std::to_string(total_runs) + " runs"
                        : failures.front() + " (+" + std::to_string(failed_runs - 1) + " more)");
  for (const auto& [c, display] : categories) {
    const auto& h = hits[c];
    push(display, h.empty(),
         h.empty() ? "" : h.front() + " (+" + std::to_string(h.size() - 1) + " more)");
  }
  push("merit parameter non-decreasing", merit_nonmonotone == 0,
       merit_nonmonotone == 0 ? "" : std::to_string(merit_nonmonotone) + " decreases");
  push("control parameters within post-hoc bounds", control_bound_failures.empty(),
       control_bound_failures.empty() ? "" : control_bound_failures.front());
  return lines;
}

}  // namespace trsqp
