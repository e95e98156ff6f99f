#include "trsqp/trace_io.hpp"

#include <cstdio>
#include <fstream>

namespace trsqp {

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_trace_csv(const RunRecord& rec, const std::string& path, bool include_timing) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_trace_csv: cannot open '" + path + "'");
  out << kTraceSchemaV1;
  if (include_timing) out << ",wall_ns";
  out << '\n';
  for (const IterationRow& r : rec.rows) {
    out << r.k << ',' << format_double(r.true_kkt) << ',' << format_double(r.est_kkt) << ','
        << format_double(r.feas) << ',' << format_double(r.opt) << ',' << format_double(r.delta)
        << ',' << format_double(r.delta_feas) << ',' << format_double(r.delta_opt) << ','
        << format_double(r.gamma) << ',' << r.radius_case << ',' << format_double(r.mu) << ','
        << format_double(r.norm_B);
    if (include_timing) out << ',' << r.wall_ns;
    out << '\n';
  }
}

CaseProportions case_proportions(const RunRecord& rec) {
  CaseProportions cp;
  for (const IterationRow& r : rec.rows) {
    if (r.radius_case == 1) ++cp.n1;
    if (r.radius_case == 2) ++cp.n2;
    if (r.radius_case == 3) ++cp.n3;
  }
  return cp;
}

}  // namespace trsqp
