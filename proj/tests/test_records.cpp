#include <doctest.h>

#include <random>
#include <sstream>

#include "riskguard/records.hpp"
#include "riskguard/report.hpp"

using namespace riskguard;

namespace {

RecordFile parse(const std::string& text) {
  std::istringstream in(text);
  return read_records(in, "mem");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const DataFormatError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("csv scored layout") {
  const auto file = parse("kappa,loss\n0.9,0\n0.2,1\n");
  REQUIRE(file.layout == RecordLayout::scored);
  const auto& ex = std::get<std::vector<ScoredExample>>(file.records);
  REQUIRE(ex.size() == 2);
  CHECK(ex[0].kappa == 0.9);
  CHECK(ex[0].loss == 0);
  CHECK(ex[1].kappa == 0.2);
  CHECK(ex[1].loss == 1);

  CHECK(error_of("kappa,loss\n0.9,2\n").find("mem:2") != std::string::npos);
  CHECK(error_of("kappa,loss\n0.9\n").find("mem:2") != std::string::npos);
  CHECK(error_of("kappa,loss\n0.5,0\nabc,1\n").find("mem:3") != std::string::npos);
  CHECK_FALSE(error_of("loss,kappa\n1,0.5\n").empty());
}

TEST_CASE("jsonl layouts") {
  const auto scored = parse("# comment\n{\"kappa\": 0.5, \"loss\": 1, \"id\": \"x\"}\n\n{\"kappa\": -2, \"loss\": 0}\n");
  CHECK(scored.layout == RecordLayout::scored);
  CHECK(scored.size() == 2);
  CHECK(*std::get<std::vector<ScoredExample>>(scored.records)[0].id == "x");

  const auto preds = parse("{\"scores\": [0.1, 0.9], \"label\": 1}\n{\"scores\": [0.6, 0.4], \"label\": 0}\n");
  CHECK(preds.layout == RecordLayout::prediction);
  CHECK(std::get<std::vector<PredictionRecord>>(preds.records)[1].scores[0] == 0.6);

  const auto mc = parse("{\"passes\": [[0.1, 0.9], [0.2, 0.8]], \"label\": 1, \"id\": \"m0\"}\n");
  CHECK(mc.layout == RecordLayout::mc_dropout);
  CHECK(std::get<std::vector<McDropoutRecord>>(mc.records)[0].passes.size() == 2);

  const auto empty = parse("\n# nothing\n");
  CHECK_FALSE(empty.layout.has_value());
  CHECK(empty.size() == 0);
}

TEST_CASE("jsonl errors name the line and record") {
  const auto label = error_of("{\"scores\": [0.1, 0.9], \"label\": 1}\n{\"scores\": [0.1, 0.9], \"label\": 2, \"id\": \"img7\"}\n");
  CHECK(label.find("mem:2") != std::string::npos);
  CHECK(label.find("img7") != std::string::npos);

  const auto passes = error_of("{\"passes\": [[0.1, 0.9]], \"label\": 0}\n");
  CHECK(passes.find("T >= 2") != std::string::npos);

  const auto mixed = error_of("{\"kappa\": 0.5, \"loss\": 1}\n{\"scores\": [0.5, 0.5], \"label\": 0}\n");
  CHECK(mixed.find("mem:2") != std::string::npos);
  CHECK(mixed.find("mixed") != std::string::npos);

  CHECK(error_of("{\"kappa\": 0.5, \"loss\": 1\n").find("mem:1") != std::string::npos);
  CHECK_FALSE(error_of("{\"kappa\": \"high\", \"loss\": 1}\n").empty());
  CHECK_FALSE(error_of("{\"kappa\": 0.5}\n").empty());
  CHECK_FALSE(error_of("{\"kappa\": 0.5, \"loss\": 0.5}\n").empty());
  CHECK_FALSE(error_of("{\"scores\": [0.5, 0.5], \"label\": 0.5}\n").empty());
  CHECK_FALSE(error_of("[1, 2]\n").empty());
  CHECK_FALSE(error_of("{\"kappa\": 0.5, \"loss\": 0, \"scores\": [1, 2]}\n").empty());
}

TEST_CASE("written records parse back exactly") {
  std::mt19937_64 gen(61);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::ostringstream out;
  std::vector<McDropoutRecord> written;
  for (int i = 0; i < 100; ++i) {
    McDropoutRecord rec{std::vector<std::vector<double>>(3, std::vector<double>(4)), i % 4, "r" + std::to_string(i)};
    for (auto& row : rec.passes) {
      for (double& v : row) v = u(gen) * std::pow(10.0, std::uniform_int_distribution<int>(-300, 5)(gen));
    }
    out << to_json_line(rec) << '\n';
    written.push_back(rec);
  }
  const auto back = std::get<std::vector<McDropoutRecord>>(parse(out.str()).records);
  REQUIRE(back.size() == written.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].passes == written[i].passes);
    CHECK(back[i].label == written[i].label);
    CHECK(back[i].id == written[i].id);
  }

  const ScoredExample ex{0.1 + 0.2, 1, std::nullopt};
  const auto one = std::get<std::vector<ScoredExample>>(parse(to_json_line(ex)).records);
  CHECK(one[0].kappa == ex.kappa);
  const PredictionRecord pr{{1e-310, 0.3333333333333333}, 1, "p"};
  const auto two = std::get<std::vector<PredictionRecord>>(parse(to_json_line(pr)).records);
  CHECK(two[0].scores == pr.scores);
}

TEST_CASE("report json round trip and schema") {
  CalibrationReport r;
  r.theta = 0.731;
  r.bound = 0.0412;
  r.train_risk = 0.01;
  r.train_coverage = 0.5;
  r.feasible = true;
  r.k_iterations = 2;
  r.delta = 0.001;
  r.r_star = 0.05;
  r.trace = {{1, 3, 0.5, 0.1, 0.6, 6, 0, 0.2, false}, {2, 4, 0.731, 0.01, 0.5, 5, 0, 0.0412, true}};
  const auto doc = to_json(r);
  std::vector<std::string> keys;
  for (const auto& [k, v] : doc.items()) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  CHECK(keys == std::vector<std::string>{"bound", "delta", "feasible", "k_iterations", "r_star", "theta", "trace",
                                         "train_coverage", "train_risk"});
  const auto back = report_from_json(nlohmann::json::parse(doc.dump()));
  CHECK(back.theta == r.theta);
  CHECK(back.bound == r.bound);
  CHECK(back.trace.size() == 2);
  CHECK(back.trace[1].z == 4);
  CHECK(back.trace[1].feasible);
  CHECK(to_json(back) == doc);

  auto broken = doc;
  broken.erase("bound");
  CHECK_THROWS_AS(report_from_json(broken), std::invalid_argument);
  broken = doc;
  broken["theta"] = "x";
  CHECK_THROWS_AS(report_from_json(broken), std::invalid_argument);
}

TEST_CASE("curve csv") {
  std::ostringstream out;
  const std::vector<RiskCoveragePoint> curve{{0.9, 0.25, 0.0}, {0.1, 1.0, 1.0 / 3.0}};
  write_curve_csv(out, curve);
  CHECK(out.str() == "theta,coverage,risk\n0.9,0.25,0\n0.1,1,0.3333333333333333\n");
  CHECK(format_number(0.1 + 0.2) == "0.30000000000000004");
}
