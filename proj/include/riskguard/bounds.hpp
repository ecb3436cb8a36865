#pragma once

#include <cstdint>

namespace riskguard {

/// Sample size, observed error count and confidence for one inversion of the
/// binomial tail. Construction validates 1 <= m, 0 <= k <= m, 0 < delta < 1
/// and throws std::domain_error otherwise.
class BoundQuery {
 public:
  BoundQuery(std::int64_t m, std::int64_t k, double delta);

  std::int64_t m() const { return m_; }
  std::int64_t k() const { return k_; }
  double delta() const { return delta_; }

 private:
  std::int64_t m_;
  std::int64_t k_;
  double delta_;
};

struct BoundResult {
  double b_star = 1.0;
  // |binomial_tail(m, k, b_star) - delta|; zero in the vacuous k == m case.
  double residual = 0.0;
  // Width of the last bisection bracket [lo, b_star].
  double bracket = 0.0;
  int iterations = 0;
};

/// Bisection stops once the bracket is this narrow (or the root is hit exactly).
inline constexpr double kBoundTolerance = 1e-12;

/// P(X <= k) for X ~ Binomial(m, b), summed term by term in log space.
/// Throws std::domain_error unless m >= 1, 0 <= k <= m and 0 <= b <= 1.
double binomial_tail(std::int64_t m, std::int64_t k, double b);

/// Largest risk b consistent with observing k errors in m draws at level
/// delta: the root of binomial_tail(m, k, b) = delta. The returned value is
/// the upper end of the final bracket, so binomial_tail(m, k, b_star) <= delta.
/// For k == m the tail is identically one and b_star = 1.
BoundResult solve_b_star(const BoundQuery& q);

/// k/m + sqrt(ln(1/delta) / (2m)). Not clamped to 1; only used to report the
/// slack of the exact bound.
double hoeffding_b(const BoundQuery& q);

}  // namespace riskguard
