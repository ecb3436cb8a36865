#pragma once

#include <iosfwd>
#include <json.hpp>
#include <span>

#include "riskguard/bounds.hpp"
#include "riskguard/selective.hpp"
#include "riskguard/sgr.hpp"
#include "riskguard/simulate.hpp"

namespace riskguard {

// JSON forms of the toolkit's outputs. Numbers are written in shortest
// round-trip form, so identical inputs give byte-identical documents.

nlohmann::json to_json(const SgrIteration& it);
nlohmann::json to_json(const CalibrationReport& report);
nlohmann::json to_json(const SelectiveMetrics& metrics);
nlohmann::json to_json(const BoundQuery& q, const BoundResult& result);
nlohmann::json summary_json(const GuaranteeSummary& summary, double delta, std::uint64_t seed);

/// Parses a report written by to_json. Throws std::invalid_argument on a
/// missing or mistyped field.
CalibrationReport report_from_json(const nlohmann::json& doc);

/// Header theta,coverage,risk then one row per point.
void write_curve_csv(std::ostream& out, std::span<const RiskCoveragePoint> curve);

/// Header trial,seed,feasible,theta,bound,train_coverage,true_risk,violated.
void write_trials_csv(std::ostream& out, std::span<const GuaranteeTrial> trials);

/// Shortest decimal that parses back to exactly `v`.
std::string format_number(double v);

}  // namespace riskguard
