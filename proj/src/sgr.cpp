#include "riskguard/sgr.hpp"

#include <cmath>
#include <stdexcept>

#include "riskguard/bounds.hpp"

namespace riskguard {

int sgr_iterations(std::size_t m) {
  int k = 0;
  // Smallest k with 2^k >= m, computed on integers.
  while ((std::size_t{1} << k) < m) ++k;
  return k < 1 ? 1 : k;
}

CalibrationReport sgr_calibrate(const SgrRequest& req) {
  if (req.data.empty()) {
    throw std::invalid_argument("sgr: empty dataset");
  }
  if (!(req.r_star > 0.0 && req.r_star < 1.0)) {
    throw std::invalid_argument("sgr: target risk must lie in (0, 1)");
  }
  if (!(req.delta > 0.0 && req.delta < 1.0)) {
    throw std::invalid_argument("sgr: delta must lie in (0, 1)");
  }

  const ScoredDataset sorted = req.data.sorted_by_kappa();
  const auto m = static_cast<std::int64_t>(sorted.size());
  const int k = sgr_iterations(sorted.size());
  const double probe_delta = req.delta / k;

  CalibrationReport report;
  report.k_iterations = k;
  report.delta = req.delta;
  report.r_star = req.r_star;
  report.trace.reserve(static_cast<std::size_t>(k));

  std::int64_t z_min = 1;
  std::int64_t z_max = m;
  for (int i = 1; i <= k; ++i) {
    const std::int64_t z = (z_min + z_max + 1) / 2;
    const Threshold theta{sorted[static_cast<std::size_t>(z - 1)].kappa};
    // Ties at theta are accepted together, so the accepted set can exceed
    // m - z + 1; always count it directly.
    const SelectiveMetrics metrics = selective_metrics(sorted, theta);
    const BoundResult bound = solve_b_star(BoundQuery(metrics.accepted, metrics.errors_accepted, probe_delta));

    SgrIteration it;
    it.iteration = i;
    it.z = z;
    it.theta = theta.theta;
    it.train_risk = metrics.risk;
    it.train_coverage = metrics.coverage;
    it.accepted = metrics.accepted;
    it.errors = metrics.errors_accepted;
    it.bound = bound.b_star;
    it.feasible = bound.b_star < req.r_star;
    report.trace.push_back(it);

    if (it.feasible) {
      z_max = z;
    } else {
      z_min = z;
    }
  }

  const SgrIteration* chosen = nullptr;
  for (const auto& it : report.trace) {
    if (it.feasible && (chosen == nullptr || it.train_coverage > chosen->train_coverage)) chosen = &it;
  }
  report.feasible = chosen != nullptr;
  if (chosen == nullptr) {
    for (const auto& it : report.trace) {
      if (chosen == nullptr || it.theta > chosen->theta) chosen = &it;
    }
  }
  report.theta = chosen->theta;
  report.bound = chosen->bound;
  report.train_risk = chosen->train_risk;
  report.train_coverage = chosen->train_coverage;
  return report;
}

SelectiveMetrics evaluate(const CalibrationReport& report, const ScoredDataset& test) {
  return selective_metrics(test, Threshold{report.theta});
}

}  // namespace riskguard
