#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "trsqp/problem.hpp"
#include "trsqp/types.hpp"

namespace trsqp {

enum class NoiseKind { none, gaussian_corr, subsample };

/// Noise configuration for the gradient/Hessian oracles. gaussian_corr draws
/// gbar ~ N(grad f, sigma2*(I + 1 1^T)); subsample evaluates one uniformly
/// drawn component of a finite-sum objective.
struct NoiseModel {
  NoiseKind kind = NoiseKind::none;
  double sigma2 = 0;
  std::uint64_t seed = 0;
};

/// One independently seeded stream per (run, purpose) pair, so that enabling
/// Hessian sampling never perturbs the gradient sequence.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  RngStream(std::uint64_t seed, std::uint32_t purpose) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32), purpose};
    engine_.seed(seq);
  }

  double normal() { return normal_(engine_); }
  Index uniform_index(Index n) { return std::uniform_int_distribution<Index>(0, n - 1)(engine_); }

  Vector normal_vector(Index d) {
    Vector v(d);
    for (Index i = 0; i < d; ++i) v(i) = normal();
    return v;
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Stream bundle owned by a single solver run.
struct OracleStreams {
  RngStream gradient;
  RngStream hessian;
  RngStream probing;

  explicit OracleStreams(std::uint64_t seed)
      : gradient(seed, 0), hessian(seed, 1), probing(seed, 2) {}
};

struct GradientEstimate {
  Vector gbar;
  std::optional<Index> sample_id;  // subsample mode only
};

GradientEstimate sample_gradient(const NoiseModel& model, const ProblemInstance& problem,
                                 const Vector& x, RngStream& rng);

/// Symmetric Hessian estimate; in subsample mode `paired_sample` selects the
/// same component as the paired gradient draw.
Matrix sample_hessian(const NoiseModel& model, const ProblemInstance& problem, const Vector& x,
                      RngStream& rng, std::optional<Index> paired_sample = std::nullopt);

struct LipschitzEstimates {
  double L_grad = 0;
  double L_jac = 0;
};

/// Difference-quotient probes around x0 over random unit directions; both
/// estimates are floored at 1e-3 and kept constant for the whole run.
LipschitzEstimates estimate_lipschitz(const ProblemInstance& problem, const Vector& x0, int n_probe,
                                      RngStream& rng, double probe_radius = 0.1);

}  // namespace trsqp
