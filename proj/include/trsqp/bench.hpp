#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trsqp/libsvm.hpp"
#include "trsqp/problem.hpp"

namespace trsqp {

/// Builds one of the built-in equality-constrained test problems. All provide
/// analytic gradients, Hessians, Jacobians, constraint Hessians, and the
/// collection's standard initial point. Throws std::invalid_argument for an
/// unknown name.
ProblemInstance make_builtin_problem(const std::string& name);

std::vector<std::string> builtin_problem_names();

/// Known optimum of a built-in problem, used by the verification suite.
struct BuiltinOptimum {
  Vector x_star;
  double f_star = 0;
};
std::optional<BuiltinOptimum> builtin_optimum(const std::string& name);

/// Closed-form KKT data of the convex quadratic fixtures:
/// min 0.5 x'Qx - b'x s.t. Ax = a.
struct QuadraticData {
  Matrix Q;
  Vector b;
  Matrix A;
  Vector a;
};
std::optional<QuadraticData> builtin_quadratic_data(const std::string& name);

/// Equality-constrained logistic regression over a dataset:
/// min (1/N) sum log(1 + exp(-y_i <z_i, x>)) s.t. A x = b.
struct LogRegProblem {
  Dataset dataset;
  Matrix A;
  Vector b;
  ProblemInstance problem;
};

/// Value and full (or single-sample) gradient of the logistic objective,
/// with overflow-safe log/exp branching.
std::pair<double, Vector> logreg_value_grad(const LogRegProblem& problem, const Vector& x,
                                            std::optional<Index> sample = std::nullopt);

/// Draws A, b entrywise from N(0,1) under the seed; regenerates (up to 10
/// attempts) until A passes the full-row-rank condition check. The initial
/// iterate is the all-ones vector.
LogRegProblem make_logreg_problem(const Dataset& dataset, Index m, std::uint64_t seed);

}  // namespace trsqp
