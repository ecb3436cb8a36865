#pragma once

#include <cstdint>
#include <vector>

#include "riskguard/selective.hpp"

namespace riskguard {

struct SgrRequest {
  ScoredDataset data;
  double r_star = 0.0;
  double delta = 0.001;
};

/// One probe of the threshold search. `z` is the 1-based index into the
/// kappa-ascending calibration set; `bound` was certified at delta / k.
struct SgrIteration {
  int iteration = 0;
  std::int64_t z = 0;
  double theta = 0.0;
  double train_risk = 0.0;
  double train_coverage = 0.0;
  std::int64_t accepted = 0;
  std::int64_t errors = 0;
  double bound = 1.0;
  bool feasible = false;
};

struct CalibrationReport {
  double theta = 0.0;
  double bound = 1.0;
  double train_risk = 0.0;
  double train_coverage = 0.0;
  bool feasible = false;
  int k_iterations = 0;
  double delta = 0.0;
  double r_star = 0.0;
  std::vector<SgrIteration> trace;
};

/// ceil(log2 m), floored at 1 so a single example still gets one probe.
int sgr_iterations(std::size_t m);

/// Binary search over the kappa-sorted calibration set for the lowest
/// threshold whose certified risk bound is below r_star.
///
/// Every probe is bounded at confidence delta / k_iterations, so with
/// probability at least 1 - delta every bound in the trace holds at once.
/// The report carries the feasible probe with the largest coverage (ties go
/// to the earlier probe). When no probe is feasible the report is marked
/// infeasible and carries the highest-threshold probe.
///
/// Throws std::invalid_argument for an empty dataset or r_star, delta
/// outside (0, 1).
CalibrationReport sgr_calibrate(const SgrRequest& req);

/// Metrics of the report's threshold on a held-out set.
SelectiveMetrics evaluate(const CalibrationReport& report, const ScoredDataset& test);

}  // namespace riskguard
