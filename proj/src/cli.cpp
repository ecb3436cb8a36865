#include "riskguard/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "riskguard/bounds.hpp"
#include "riskguard/confidence.hpp"
#include "riskguard/records.hpp"
#include "riskguard/report.hpp"
#include "riskguard/selective.hpp"
#include "riskguard/sgr.hpp"
#include "riskguard/simulate.hpp"

namespace riskguard::cli {

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string input;
  std::string output;
  std::string report;
  std::string kappa;
  std::string loss;
  std::string scores = "probabilities";
  std::vector<double> risks;
  double delta = 0.001;
  std::int64_t m = 0;
  std::int64_t errors = 0;
  std::string dist;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  std::string trials_csv;
  unsigned threads = 0;
};

const auto kOpenUnit = CLI::Validator(
    [](std::string& s) -> std::string {
      double v = 0.0;
      std::istringstream in(s);
      if (!(in >> v) || !(v > 0.0 && v < 1.0)) return "value must lie strictly between 0 and 1";
      return {};
    },
    "(0,1)");

ScoringOptions scoring_options(const Config& cfg, const RecordFile& file) {
  ScoringOptions opts;
  const RecordLayout layout = file.layout.value_or(RecordLayout::scored);

  if (cfg.kappa.empty()) {
    opts.kappa = layout == RecordLayout::scored       ? KappaKind::precomputed
                 : layout == RecordLayout::prediction ? KappaKind::softmax_response
                                                      : KappaKind::mc_dropout;
  } else if (cfg.kappa == "sr") {
    opts.kappa = KappaKind::softmax_response;
  } else if (cfg.kappa == "mc-dropout") {
    opts.kappa = KappaKind::mc_dropout;
  } else {
    opts.kappa = KappaKind::precomputed;
  }

  if (cfg.loss.empty()) {
    opts.loss = layout == RecordLayout::scored ? LossKind::given() : LossKind::top(1);
  } else if (cfg.loss == "precomputed") {
    opts.loss = LossKind::given();
  } else if (cfg.loss == "top1") {
    opts.loss = LossKind::top(1);
  } else if (cfg.loss == "top5") {
    opts.loss = LossKind::top(5);
  } else if (cfg.loss.rfind("topk:", 0) == 0) {
    int k = 0;
    const std::string digits = cfg.loss.substr(5);
    try {
      std::size_t used = 0;
      k = std::stoi(digits, &used);
      if (used != digits.size()) k = 0;
    } catch (const std::exception&) {
      k = 0;
    }
    if (k < 1) throw UsageError("--loss topk:K needs a positive integer K");
    opts.loss = LossKind::top(k);
  } else {
    throw UsageError("unknown --loss '" + cfg.loss + "'");
  }
  opts.probabilities = cfg.scores == "probabilities";
  return opts;
}

ScoredDataset load_dataset(const Config& cfg) {
  const RecordFile file = read_records(std::filesystem::path(cfg.input));
  ScoredDataset data = score_dataset(file.records, scoring_options(cfg, file));
  if (data.empty()) throw DataError(cfg.input + ": empty dataset");
  return data;
}

class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : path_(path), out_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw std::runtime_error("cannot open output file " + path);
      out_ = &file_;
    }
  }
  std::ostream& stream() { return *out_; }
  void close() {
    out_->flush();
    if (!*out_) throw std::runtime_error("write failed" + (path_.empty() ? std::string() : " for " + path_));
  }

 private:
  std::string path_;
  std::ofstream file_;
  std::ostream* out_;
};

void emit_json(const json& doc, const std::string& path, std::ostream& out) {
  Sink sink(path, out);
  sink.stream() << doc.dump(2) << '\n';
  sink.close();
}

int do_calibrate(const Config& cfg, std::ostream& out, std::ostream& err) {
  const ScoredDataset data = load_dataset(cfg);
  if (cfg.risks.size() > 1) {
    err << "warning: " << cfg.risks.size()
        << " target risks certified from one calibration set without multiple-testing correction; "
           "all bounds hold jointly only at confidence 1 - "
        << format_number(static_cast<double>(cfg.risks.size()) * cfg.delta) << '\n';
  }
  json docs = json::array();
  bool all_feasible = true;
  for (double r : cfg.risks) {
    const CalibrationReport report = sgr_calibrate({data, r, cfg.delta});
    all_feasible = all_feasible && report.feasible;
    if (!report.feasible) {
      err << "certification infeasible: no threshold reaches bound < " << format_number(r) << " at delta "
          << format_number(cfg.delta) << '\n';
    }
    docs.push_back(to_json(report));
  }
  emit_json(docs.size() == 1 ? docs.front() : docs, cfg.output, out);
  return all_feasible ? kOk : kInfeasible;
}

int do_evaluate(const Config& cfg, std::ostream& out) {
  std::ifstream in(cfg.report);
  if (!in) throw DataError("cannot open report " + cfg.report);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(cfg.report + ": invalid JSON: " + e.what());
  }
  std::vector<CalibrationReport> reports;
  try {
    if (doc.is_array()) {
      for (const auto& d : doc) reports.push_back(report_from_json(d));
    } else {
      reports.push_back(report_from_json(doc));
    }
  } catch (const std::invalid_argument& e) {
    throw DataError(cfg.report + ": " + e.what());
  }

  const ScoredDataset test = load_dataset(cfg);
  json results = json::array();
  for (const auto& r : reports) {
    json row = to_json(evaluate(r, test));
    row["theta"] = r.theta;
    row["bound"] = r.bound;
    row["r_star"] = r.r_star;
    results.push_back(std::move(row));
  }
  emit_json(results.size() == 1 ? results.front() : results, cfg.output, out);
  return kOk;
}

int do_bound(const Config& cfg, std::ostream& out) {
  std::optional<BoundQuery> q;
  try {
    q.emplace(cfg.m, cfg.errors, cfg.delta);
  } catch (const std::domain_error& e) {
    throw UsageError(e.what());
  }
  emit_json(to_json(*q, solve_b_star(*q)), cfg.output, out);
  return kOk;
}

int do_curve(const Config& cfg, std::ostream& out) {
  const auto curve = risk_coverage_curve(load_dataset(cfg));
  Sink sink(cfg.output, out);
  write_curve_csv(sink.stream(), curve);
  sink.close();
  return kOk;
}

SyntheticDistribution parse_dist(const std::string& spec, std::uint64_t seed) {
  std::vector<double> params;
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  if (colon != std::string::npos) {
    std::istringstream rest(spec.substr(colon + 1));
    std::string piece;
    while (std::getline(rest, piece, ':')) {
      try {
        std::size_t used = 0;
        params.push_back(std::stod(piece, &used));
        if (used != piece.size()) throw std::invalid_argument(piece);
      } catch (const std::exception&) {
        throw UsageError("--dist: bad parameter '" + piece + "'");
      }
    }
  }
  try {
    if (kind == "linear" && params.size() == 1) return SyntheticDistribution::linear(params[0], seed);
    if (kind == "constant" && params.size() == 1) return SyntheticDistribution::constant(params[0], seed);
    if (kind == "logistic" && params.size() == 2) return SyntheticDistribution::logistic(params[0], params[1], seed);
  } catch (const std::domain_error& e) {
    throw UsageError(std::string("--dist: ") + e.what());
  }
  throw UsageError("--dist must be linear:A, constant:C or logistic:SLOPE:CENTER");
}

int do_simulate(const Config& cfg, std::ostream& out) {
  if (cfg.risks.size() != 1) throw UsageError("simulate takes exactly one --risk");
  if (cfg.m < 1) throw UsageError("--m must be >= 1");
  if (cfg.trials < 1) throw UsageError("--trials must be >= 1");
  const auto dist = parse_dist(cfg.dist, cfg.seed);
  const auto summary = validate_guarantee(dist, static_cast<std::size_t>(cfg.m), cfg.risks.front(), cfg.delta,
                                          cfg.trials, cfg.threads);
  if (!cfg.trials_csv.empty()) {
    Sink sink(cfg.trials_csv, out);
    write_trials_csv(sink.stream(), summary.trials);
    sink.close();
  }
  emit_json(summary_json(summary, cfg.delta, cfg.seed), cfg.output, out);
  return kOk;
}

void add_scoring_flags(CLI::App* sub, Config& cfg) {
  sub->add_option("--kappa", cfg.kappa, "Confidence rate: sr, mc-dropout or precomputed (default: by layout)")
      ->check(CLI::IsMember({"sr", "mc-dropout", "precomputed"}));
  sub->add_option("--loss", cfg.loss, "Loss: top1, top5, topk:K or precomputed (default: by layout)");
  sub->add_option("--scores", cfg.scores, "Prediction scores are 'probabilities' or 'logits'")
      ->check(CLI::IsMember({"probabilities", "logits"}))
      ->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Config cfg;
  CLI::App app{"Selective classification with a certified risk bound"};
  app.require_subcommand(1);

  auto* calibrate = app.add_subcommand("calibrate", "Learn a rejection threshold with a certified risk bound");
  calibrate->add_option("--input", cfg.input, "Calibration records")->required()->check(CLI::ExistingFile);
  calibrate->add_option("--risk", cfg.risks, "Target selective risk (repeatable)")->required()->check(kOpenUnit);
  calibrate->add_option("--delta", cfg.delta, "Confidence parameter")->check(kOpenUnit)->capture_default_str();
  calibrate->add_option("--output", cfg.output, "Report path (default: stdout)");
  add_scoring_flags(calibrate, cfg);

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Apply a calibration report to a test set");
  evaluate_cmd->add_option("--input", cfg.input, "Test records")->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--report", cfg.report, "Calibration report JSON")->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--output", cfg.output, "Metrics path (default: stdout)");
  add_scoring_flags(evaluate_cmd, cfg);

  auto* bound = app.add_subcommand("bound", "Invert the binomial tail for one (m, errors, delta)");
  bound->add_option("--m", cfg.m, "Sample size")->required();
  bound->add_option("--errors", cfg.errors, "Observed errors")->required();
  bound->add_option("--delta", cfg.delta, "Confidence parameter")->check(kOpenUnit)->capture_default_str();
  bound->add_option("--output", cfg.output, "Result path (default: stdout)");

  auto* curve = app.add_subcommand("curve", "Write the empirical risk-coverage curve as CSV");
  curve->add_option("--input", cfg.input, "Records")->required()->check(CLI::ExistingFile);
  curve->add_option("--output", cfg.output, "CSV path (default: stdout)");
  add_scoring_flags(curve, cfg);

  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo check of the risk guarantee on synthetic data");
  simulate->add_option("--dist", cfg.dist, "linear:A, constant:C or logistic:SLOPE:CENTER")->required();
  simulate->add_option("--m", cfg.m, "Calibration set size")->required();
  simulate->add_option("--risk", cfg.risks, "Target selective risk")->required()->check(kOpenUnit);
  simulate->add_option("--delta", cfg.delta, "Confidence parameter")->check(kOpenUnit)->capture_default_str();
  simulate->add_option("--trials", cfg.trials, "Independent calibrations")->capture_default_str();
  simulate->add_option("--seed", cfg.seed, "Base seed; trial i uses seed XOR i")->capture_default_str();
  simulate->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)");
  simulate->add_option("--trials-csv", cfg.trials_csv, "Per-trial CSV log");
  simulate->add_option("--output", cfg.output, "Summary path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return e.get_exit_code() == 0 ? kOk : kUsage;
  }

  try {
    if (*calibrate) return do_calibrate(cfg, out, err);
    if (*evaluate_cmd) return do_evaluate(cfg, out);
    if (*bound) return do_bound(cfg, out);
    if (*curve) return do_curve(cfg, out);
    if (*simulate) return do_simulate(cfg, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataFormatError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataFormat;
  } catch (const RecordError& e) {
    err << "data error: " << cfg.input << ": " << e.what() << '\n';
    return kDataFormat;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataFormat;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace riskguard::cli
