#include "riskguard/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace riskguard {

BoundQuery::BoundQuery(std::int64_t m, std::int64_t k, double delta)
    : m_(m), k_(k), delta_(delta) {
  if (m < 1) {
    throw std::domain_error("bound query: m must be >= 1, got " + std::to_string(m));
  }
  if (k < 0 || k > m) {
    throw std::domain_error("bound query: errors must lie in [0, m], got k=" + std::to_string(k) +
                            " m=" + std::to_string(m));
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::domain_error("bound query: delta must lie in (0, 1)");
  }
}

namespace {

// log(n!) - log(sqrt(2 pi n) (n/e)^n) for n = 0..15.
constexpr double kStirlingError[] = {
    0.0,
    0.08106146679532725821967026,
    0.04134069595540929409382208,
    0.02767792568499833914878929,
    0.02079067210376509311152277,
    0.01664469118982119216319487,
    0.01387612882307074799874573,
    0.01189670994589177009505572,
    0.01041126526197209649747857,
    0.009255462182712732917728637,
    0.008330563433362871256469319,
    0.007573675487951840794972024,
    0.006942840107209529865664153,
    0.006408994188004207068439631,
    0.005951370112758847735624416,
    0.00555473355196280137103869,
};

double stirling_error(double n) {
  constexpr double s0 = 1.0 / 12.0;
  constexpr double s1 = 1.0 / 360.0;
  constexpr double s2 = 1.0 / 1260.0;
  constexpr double s3 = 1.0 / 1680.0;
  constexpr double s4 = 1.0 / 1188.0;
  if (n <= 15.0) return kStirlingError[static_cast<int>(n)];
  const double nn = n * n;
  if (n > 500.0) return (s0 - s1 / nn) / n;
  if (n > 80.0) return (s0 - (s1 - s2 / nn) / nn) / n;
  if (n > 35.0) return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n;
  return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

// x log(x / np) + np - x without cancellation when x is close to np.
double deviance(double x, double np) {
  if (std::abs(x - np) < 0.1 * (x + np)) {
    double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double ej = 2.0 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double next = s + ej / (2 * j + 1);
      if (next == s) return next;
      s = next;
    }
    return s;
  }
  return x * std::log(x / np) + np - x;
}

// log of C(m, j) b^j (1-b)^(m-j) in saddle-point form, accurate in absolute
// terms for any m.
double log_binomial_pmf(double j, double m, double b, double q) {
  if (j == 0.0) return m * std::log1p(-b);
  if (j == m) return m * std::log(b);
  const double lc = stirling_error(m) - stirling_error(j) - stirling_error(m - j) - deviance(j, m * b) -
                    deviance(m - j, m * q);
  const double lf = std::log(2.0 * std::numbers::pi) + std::log(j) + std::log1p(-j / m);
  return lc - 0.5 * lf;
}

// Sum of pmf terms starting at `from` and walking away from the mode (down
// when `downward`), where terms decrease monotonically. The first term is the
// largest, so it serves as the shift of the exponential sum.
double log_tail_from(std::int64_t from, std::int64_t m, double b, double q, bool downward) {
  const auto md = static_cast<double>(m);
  const double log_anchor = log_binomial_pmf(static_cast<double>(from), md, b, q);
  const double odds = downward ? q / b : b / q;
  double rel = 1.0;
  double sum = 1.0;
  for (std::int64_t j = from; downward ? j > 0 : j < m;) {
    const auto jd = static_cast<double>(j);
    rel *= downward ? (jd / (md - jd + 1.0)) * odds : ((md - jd) / (jd + 1.0)) * odds;
    j += downward ? -1 : 1;
    sum += rel;
    if (rel < sum * 0x1.0p-60) break;
  }
  return log_anchor + std::log(sum);
}

}  // namespace

double binomial_tail(std::int64_t m, std::int64_t k, double b) {
  if (m < 1 || k < 0 || k > m) {
    throw std::domain_error("binomial_tail: need m >= 1 and 0 <= k <= m");
  }
  if (!(b >= 0.0 && b <= 1.0)) {
    throw std::domain_error("binomial_tail: b must lie in [0, 1]");
  }
  if (k == m || b == 0.0) return 1.0;
  if (b == 1.0) return 0.0;

  const double q = 1.0 - b;
  const double mean = static_cast<double>(m) * b;
  double tail;
  if (static_cast<double>(k) < mean) {
    tail = std::exp(log_tail_from(k, m, b, q, true));
  } else {
    // Above the mean the tail is at least about one half; summing the
    // complement keeps the absolute error at rounding level.
    tail = 1.0 - std::exp(log_tail_from(k + 1, m, b, q, false));
  }
  return std::clamp(tail, 0.0, 1.0);
}

BoundResult solve_b_star(const BoundQuery& q) {
  BoundResult out;
  if (q.k() == q.m()) {
    return out;
  }
  // tail(0) = 1 > delta and tail(1) = 0 < delta; the tail is strictly
  // decreasing in between.
  double lo = 0.0;
  double hi = 1.0;
  double hi_tail = 0.0;
  while (hi - lo > kBoundTolerance) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const double t = binomial_tail(q.m(), q.k(), mid);
    ++out.iterations;
    if (t > q.delta()) {
      lo = mid;
    } else {
      hi = mid;
      hi_tail = t;
      if (t == q.delta()) break;
    }
  }
  out.b_star = hi;
  out.bracket = hi - lo;
  out.residual = std::abs(hi_tail - q.delta());
  return out;
}

double hoeffding_b(const BoundQuery& q) {
  const auto md = static_cast<double>(q.m());
  return static_cast<double>(q.k()) / md + std::sqrt(std::log(1.0 / q.delta()) / (2.0 * md));
}

}  // namespace riskguard
