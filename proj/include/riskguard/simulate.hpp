#pragma once

#include <cstdint>
#include <vector>

#include "riskguard/selective.hpp"
#include "riskguard/sgr.hpp"

namespace riskguard {

/// Synthetic source with kappa ~ Uniform(0, 1) and loss ~ Bernoulli(e(kappa))
/// for a nonincreasing error curve e:
///   linear:   e(k) = a (1 - k),               0 <= a <= 1
///   constant: e(k) = c,                       0 <= c <= 1
///   logistic: e(k) = 1 / (1 + exp(s (k - c))), s >= 0
class SyntheticDistribution {
 public:
  enum class Kind { linear, constant, logistic };

  static SyntheticDistribution linear(double a, std::uint64_t seed = 0);
  static SyntheticDistribution constant(double c, std::uint64_t seed = 0);
  static SyntheticDistribution logistic(double slope, double center, std::uint64_t seed = 0);

  Kind kind() const { return kind_; }
  double p0() const { return p0_; }
  double p1() const { return p1_; }
  std::uint64_t seed() const { return seed_; }
  SyntheticDistribution with_seed(std::uint64_t seed) const;

  /// Error probability at confidence kappa (kappa clamped to [0, 1]).
  double error_probability(double kappa) const;

 private:
  SyntheticDistribution(Kind kind, double p0, double p1, std::uint64_t seed);

  Kind kind_;
  double p0_;
  double p1_;
  std::uint64_t seed_;
};

/// m i.i.d. draws from `dist` using mt19937_64 seeded with dist.seed().
/// Each example consumes two 64-bit outputs, kappa first; a draw u maps to
/// (u >> 11) * 2^-53.
ScoredDataset sample_dataset(const SyntheticDistribution& dist, std::size_t m);

/// E[e(kappa) | kappa >= theta]. Closed form for linear and constant,
/// adaptive Gauss-Kronrod quadrature for logistic. Throws std::domain_error
/// when theta >= 1 (nothing is accepted).
double true_selective_risk(const SyntheticDistribution& dist, double theta);

struct GuaranteeTrial {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  CalibrationReport report;
  // Only meaningful for feasible reports.
  double true_selective_risk = 0.0;
  bool violated = false;
};

struct GuaranteeSummary {
  double violation_rate = 0.0;
  std::size_t violations = 0;
  std::size_t feasible_trials = 0;
  std::size_t infeasible_trials = 0;
  std::vector<GuaranteeTrial> trials;
};

/// Seed of trial i: base seed XOR i.
inline std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) { return seed ^ trial; }

/// Repeats calibration on fresh samples and counts the feasible reports whose
/// bound falls below the analytic selective risk at their threshold.
/// Trials run on up to `threads` workers (0 = hardware concurrency); the
/// result does not depend on the thread count.
GuaranteeSummary validate_guarantee(const SyntheticDistribution& dist, std::size_t m, double r_star, double delta,
                                    std::size_t trials, unsigned threads = 0);

}  // namespace riskguard
