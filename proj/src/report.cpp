#include "riskguard/report.hpp"

#include <charconv>
#include <ostream>
#include <stdexcept>

namespace riskguard {

using nlohmann::json;

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("format_number: conversion failed");
  return std::string(buf, ptr);
}

json to_json(const SgrIteration& it) {
  return {{"iteration", it.iteration},   {"z", it.z},
          {"theta", it.theta},           {"train_risk", it.train_risk},
          {"train_coverage", it.train_coverage}, {"accepted", it.accepted},
          {"errors", it.errors},         {"bound", it.bound},
          {"feasible", it.feasible}};
}

json to_json(const CalibrationReport& report) {
  json trace = json::array();
  for (const auto& it : report.trace) trace.push_back(to_json(it));
  return {{"theta", report.theta},
          {"bound", report.bound},
          {"train_risk", report.train_risk},
          {"train_coverage", report.train_coverage},
          {"feasible", report.feasible},
          {"delta", report.delta},
          {"r_star", report.r_star},
          {"k_iterations", report.k_iterations},
          {"trace", std::move(trace)}};
}

json to_json(const SelectiveMetrics& metrics) {
  return {{"risk", metrics.risk},
          {"coverage", metrics.coverage},
          {"accepted", metrics.accepted},
          {"errors_accepted", metrics.errors_accepted},
          {"degenerate", metrics.degenerate}};
}

json to_json(const BoundQuery& q, const BoundResult& result) {
  return {{"m", q.m()},
          {"errors", q.k()},
          {"delta", q.delta()},
          {"b_star", result.b_star},
          {"residual", result.residual},
          {"iterations", result.iterations},
          {"hoeffding", hoeffding_b(q)}};
}

json summary_json(const GuaranteeSummary& summary, double delta, std::uint64_t seed) {
  return {{"violation_rate", summary.violation_rate},
          {"violations", summary.violations},
          {"feasible_trials", summary.feasible_trials},
          {"infeasible_trials", summary.infeasible_trials},
          {"delta", delta},
          {"trials", summary.trials.size()},
          {"seed", seed}};
}

namespace {

template <typename T>
T field(const json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end()) throw std::invalid_argument(std::string("report: missing field '") + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument(std::string("report: field '") + key + "' has the wrong type");
  }
}

double number(const json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it != doc.end() && !it->is_number()) {
    throw std::invalid_argument(std::string("report: field '") + key + "' is not a number");
  }
  return field<double>(doc, key);
}

}  // namespace

CalibrationReport report_from_json(const json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("report: expected a JSON object");
  CalibrationReport r;
  r.theta = number(doc, "theta");
  r.bound = number(doc, "bound");
  r.train_risk = number(doc, "train_risk");
  r.train_coverage = number(doc, "train_coverage");
  r.feasible = field<bool>(doc, "feasible");
  r.delta = number(doc, "delta");
  r.r_star = number(doc, "r_star");
  r.k_iterations = field<int>(doc, "k_iterations");
  const auto trace = doc.find("trace");
  if (trace == doc.end() || !trace->is_array()) throw std::invalid_argument("report: 'trace' must be an array");
  for (const auto& t : *trace) {
    SgrIteration it;
    it.iteration = field<int>(t, "iteration");
    it.z = field<std::int64_t>(t, "z");
    it.theta = number(t, "theta");
    it.train_risk = number(t, "train_risk");
    it.train_coverage = number(t, "train_coverage");
    it.accepted = field<std::int64_t>(t, "accepted");
    it.errors = field<std::int64_t>(t, "errors");
    it.bound = number(t, "bound");
    it.feasible = field<bool>(t, "feasible");
    r.trace.push_back(it);
  }
  return r;
}

void write_curve_csv(std::ostream& out, std::span<const RiskCoveragePoint> curve) {
  out << "theta,coverage,risk\n";
  for (const auto& p : curve) {
    out << format_number(p.theta) << ',' << format_number(p.coverage) << ',' << format_number(p.risk) << '\n';
  }
}

void write_trials_csv(std::ostream& out, std::span<const GuaranteeTrial> trials) {
  out << "trial,seed,feasible,theta,bound,train_coverage,true_risk,violated\n";
  for (const auto& t : trials) {
    out << t.trial << ',' << t.seed << ',' << (t.report.feasible ? 1 : 0) << ',' << format_number(t.report.theta)
        << ',' << format_number(t.report.bound) << ',' << format_number(t.report.train_coverage) << ','
        << format_number(t.true_selective_risk) << ',' << (t.violated ? 1 : 0) << '\n';
  }
}

}  // namespace riskguard
