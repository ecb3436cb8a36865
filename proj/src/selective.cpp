#include "riskguard/selective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace riskguard {

void validate(const ScoredExample& ex) {
  if (!std::isfinite(ex.kappa)) {
    throw std::invalid_argument("scored example: kappa must be finite");
  }
  if (ex.loss != 0 && ex.loss != 1) {
    throw std::invalid_argument("scored example: loss must be 0 or 1");
  }
}

ScoredDataset::ScoredDataset(std::vector<ScoredExample> examples) : examples_(std::move(examples)) {
  for (const auto& ex : examples_) validate(ex);
  sorted_ = std::is_sorted(examples_.begin(), examples_.end(),
                           [](const ScoredExample& a, const ScoredExample& b) { return a.kappa < b.kappa; });
}

ScoredDataset ScoredDataset::sorted_by_kappa() const {
  if (sorted_) return *this;
  auto copy = examples_;
  std::stable_sort(copy.begin(), copy.end(),
                   [](const ScoredExample& a, const ScoredExample& b) { return a.kappa < b.kappa; });
  return ScoredDataset(std::move(copy));
}

SelectiveMetrics selective_metrics(const ScoredDataset& data, Threshold t) {
  if (data.empty()) {
    throw std::invalid_argument("selective metrics: empty dataset");
  }
  SelectiveMetrics out;
  for (const auto& ex : data.examples()) {
    if (select(t, ex.kappa) == Decision::accept) {
      ++out.accepted;
      out.errors_accepted += ex.loss;
    }
  }
  out.coverage = static_cast<double>(out.accepted) / static_cast<double>(data.size());
  if (out.accepted > 0) {
    out.risk = static_cast<double>(out.errors_accepted) / static_cast<double>(out.accepted);
  } else {
    out.degenerate = true;
  }
  return out;
}

ScoredDataset g_projection(const ScoredDataset& data, Threshold t) {
  std::vector<ScoredExample> kept;
  for (const auto& ex : data.examples()) {
    if (select(t, ex.kappa) == Decision::accept) kept.push_back(ex);
  }
  return ScoredDataset(std::move(kept));
}

std::vector<RiskCoveragePoint> risk_coverage_curve(const ScoredDataset& data) {
  if (data.empty()) {
    throw std::invalid_argument("risk-coverage curve: empty dataset");
  }
  std::vector<std::pair<double, int>> scored;
  scored.reserve(data.size());
  for (const auto& ex : data.examples()) scored.emplace_back(ex.kappa, ex.loss);
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

  const auto m = static_cast<double>(scored.size());
  std::vector<RiskCoveragePoint> curve;
  std::int64_t accepted = 0;
  std::int64_t errors = 0;
  for (std::size_t i = 0; i < scored.size();) {
    const double theta = scored[i].first;
    // A threshold accepts a whole tie group at once.
    for (; i < scored.size() && scored[i].first == theta; ++i) {
      ++accepted;
      errors += scored[i].second;
    }
    curve.push_back({theta, static_cast<double>(accepted) / m,
                     static_cast<double>(errors) / static_cast<double>(accepted)});
  }
  return curve;
}

}  // namespace riskguard
