#pragma once

#include <string>

#include "trsqp/solver.hpp"

namespace trsqp {

/// Versioned trace schema; changing the columns requires bumping the version
/// and the golden-file test.
inline constexpr const char* kTraceSchemaV1 =
    "k,true_kkt,est_kkt,feas,opt,delta,delta_feas,delta_opt,gamma,case,mu,norm_B";

/// Round-trip-exact decimal rendering used by every CSV/JSON emitter, so that
/// reruns with identical plans produce byte-identical outputs.
std::string format_double(double value);

/// Writes the per-iteration trace as RFC-4180 CSV. Wall-clock timings are
/// excluded by default: they are the one non-deterministic column and would
/// break byte-identical reruns.
void write_trace_csv(const RunRecord& rec, const std::string& path, bool include_timing = false);

struct CaseProportions {
  long n1 = 0, n2 = 0, n3 = 0;
  long total() const { return n1 + n2 + n3; }
  double pct1() const { return total() ? 100.0 * double(n1) / double(total()) : 0.0; }
  double pct2() const { return total() ? 100.0 * double(n2) / double(total()) : 0.0; }
  double pct3() const { return total() ? 100.0 * double(n3) / double(total()) : 0.0; }
};

CaseProportions case_proportions(const RunRecord& rec);

}  // namespace trsqp
