#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace riskguard {

/// One calibration or test point: a confidence score and its 0/1 loss.
struct ScoredExample {
  double kappa = 0.0;
  int loss = 0;
  std::optional<std::string> id;
};

/// Throws std::invalid_argument unless kappa is finite and loss is 0 or 1.
void validate(const ScoredExample& ex);

/// Immutable collection of scored examples. Every example is validated on
/// construction. `sorted()` reports whether kappa is nondecreasing.
class ScoredDataset {
 public:
  ScoredDataset() = default;
  explicit ScoredDataset(std::vector<ScoredExample> examples);

  std::span<const ScoredExample> examples() const { return examples_; }
  std::size_t size() const { return examples_.size(); }
  bool empty() const { return examples_.empty(); }
  bool sorted() const { return sorted_; }
  const ScoredExample& operator[](std::size_t i) const { return examples_[i]; }

  /// Stable sort by kappa ascending; ties keep input order.
  ScoredDataset sorted_by_kappa() const;

 private:
  std::vector<ScoredExample> examples_;
  bool sorted_ = true;
};

struct Threshold {
  double theta = 0.0;
};

enum class Decision { reject = 0, accept = 1 };

/// Accept iff kappa >= theta.
inline Decision select(Threshold t, double kappa) {
  return kappa >= t.theta ? Decision::accept : Decision::reject;
}

struct SelectiveMetrics {
  double risk = 0.0;
  double coverage = 0.0;
  std::int64_t accepted = 0;
  std::int64_t errors_accepted = 0;
  // Nothing accepted: risk is reported as 0 and is meaningless.
  bool degenerate = false;
};

struct RiskCoveragePoint {
  double theta = 0.0;
  double coverage = 0.0;
  double risk = 0.0;
};

/// Throws std::invalid_argument on an empty dataset.
SelectiveMetrics selective_metrics(const ScoredDataset& data, Threshold t);

/// Accepted subset, input order preserved.
ScoredDataset g_projection(const ScoredDataset& data, Threshold t);

/// One point per distinct kappa, thresholds descending, so coverage is
/// strictly increasing along the result and the last point has coverage 1.
std::vector<RiskCoveragePoint> risk_coverage_curve(const ScoredDataset& data);

}  // namespace riskguard
