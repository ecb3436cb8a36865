#include "riskguard/simulate.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

namespace riskguard {

SyntheticDistribution::SyntheticDistribution(Kind kind, double p0, double p1, std::uint64_t seed)
    : kind_(kind), p0_(p0), p1_(p1), seed_(seed) {}

SyntheticDistribution SyntheticDistribution::linear(double a, std::uint64_t seed) {
  if (!(a >= 0.0 && a <= 1.0)) throw std::domain_error("linear error: slope must lie in [0, 1]");
  return {Kind::linear, a, 0.0, seed};
}

SyntheticDistribution SyntheticDistribution::constant(double c, std::uint64_t seed) {
  if (!(c >= 0.0 && c <= 1.0)) throw std::domain_error("constant error: rate must lie in [0, 1]");
  return {Kind::constant, c, 0.0, seed};
}

SyntheticDistribution SyntheticDistribution::logistic(double slope, double center, std::uint64_t seed) {
  if (!(slope >= 0.0) || !std::isfinite(slope) || !std::isfinite(center)) {
    throw std::domain_error("logistic error: need finite slope >= 0 and finite center");
  }
  return {Kind::logistic, slope, center, seed};
}

SyntheticDistribution SyntheticDistribution::with_seed(std::uint64_t seed) const {
  auto copy = *this;
  copy.seed_ = seed;
  return copy;
}

double SyntheticDistribution::error_probability(double kappa) const {
  const double x = std::clamp(kappa, 0.0, 1.0);
  switch (kind_) {
    case Kind::linear:
      return p0_ * (1.0 - x);
    case Kind::constant:
      return p0_;
    case Kind::logistic:
      return 1.0 / (1.0 + std::exp(p0_ * (x - p1_)));
  }
  return 0.0;
}

namespace {

double unit_draw(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

}  // namespace

ScoredDataset sample_dataset(const SyntheticDistribution& dist, std::size_t m) {
  if (m < 1) throw std::domain_error("sample_dataset: m must be >= 1");
  std::mt19937_64 gen(dist.seed());
  std::vector<ScoredExample> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double kappa = unit_draw(gen);
    const double u = unit_draw(gen);
    out.push_back({kappa, u < dist.error_probability(kappa) ? 1 : 0, std::nullopt});
  }
  return ScoredDataset(std::move(out));
}

double true_selective_risk(const SyntheticDistribution& dist, double theta) {
  if (!std::isfinite(theta)) throw std::domain_error("true selective risk: theta must be finite");
  if (theta >= 1.0) throw std::domain_error("true selective risk: nothing is accepted at theta >= 1");
  const double lo = std::max(theta, 0.0);
  switch (dist.kind()) {
    case SyntheticDistribution::Kind::linear:
      // (1/(1-lo)) * integral_lo^1 a (1 - k) dk
      return dist.p0() * (1.0 - lo) / 2.0;
    case SyntheticDistribution::Kind::constant:
      return dist.p0();
    case SyntheticDistribution::Kind::logistic: {
      const auto integrand = [&dist](double k) { return dist.error_probability(k); };
      const double integral =
          boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, lo, 1.0, 15, 1e-12);
      return integral / (1.0 - lo);
    }
  }
  return 0.0;
}

GuaranteeSummary validate_guarantee(const SyntheticDistribution& dist, std::size_t m, double r_star, double delta,
                                    std::size_t trials, unsigned threads) {
  if (trials < 1) throw std::domain_error("validate_guarantee: trials must be >= 1");
  if (m < 1) throw std::domain_error("validate_guarantee: m must be >= 1");
  if (!(r_star > 0.0 && r_star < 1.0) || !(delta > 0.0 && delta < 1.0)) {
    throw std::domain_error("validate_guarantee: r_star and delta must lie in (0, 1)");
  }
  GuaranteeSummary summary;
  summary.trials.resize(trials);

  auto run = [&](std::size_t i) {
    GuaranteeTrial& t = summary.trials[i];
    t.trial = i;
    t.seed = trial_seed(dist.seed(), i);
    const auto sample = sample_dataset(dist.with_seed(t.seed), m);
    t.report = sgr_calibrate({sample, r_star, delta});
    if (t.report.feasible) {
      t.true_selective_risk = true_selective_risk(dist, t.report.theta);
      t.violated = t.true_selective_risk > t.report.bound;
    }
  };

  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, trials));
  if (workers <= 1) {
    for (std::size_t i = 0; i < trials; ++i) run(i);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < trials; i += workers) run(i);
      });
    }
  }

  for (const auto& t : summary.trials) {
    if (t.report.feasible) {
      ++summary.feasible_trials;
      if (t.violated) ++summary.violations;
    } else {
      ++summary.infeasible_trials;
    }
  }
  summary.violation_rate = summary.feasible_trials == 0
                               ? 0.0
                               : static_cast<double>(summary.violations) / static_cast<double>(summary.feasible_trials);
  return summary;
}

}  // namespace riskguard
