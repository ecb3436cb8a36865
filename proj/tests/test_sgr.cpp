#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "riskguard/bounds.hpp"
#include "riskguard/sgr.hpp"

using namespace riskguard;

namespace {

ScoredDataset random_dataset(std::mt19937_64& gen, int m, int grid) {
  std::vector<ScoredExample> ex;
  for (int i = 0; i < m; ++i) {
    const double kappa = std::uniform_int_distribution<int>(0, grid)(gen) / static_cast<double>(grid);
    // Errors concentrate at low confidence.
    const int loss = std::uniform_real_distribution<double>(0.0, 1.0)(gen) < 0.4 * (1.0 - kappa) ? 1 : 0;
    ex.push_back({kappa, loss, {}});
  }
  return ScoredDataset(std::move(ex));
}

}  // namespace

TEST_CASE("iteration count is ceil(log2 m)") {
  CHECK(sgr_iterations(1) == 1);
  CHECK(sgr_iterations(2) == 1);
  CHECK(sgr_iterations(3) == 2);
  CHECK(sgr_iterations(4) == 2);
  CHECK(sgr_iterations(5) == 3);
  CHECK(sgr_iterations(1024) == 10);
  CHECK(sgr_iterations(1025) == 11);
  CHECK(sgr_iterations(5000) == 13);
}

TEST_CASE("request validation") {
  const ScoredDataset data({{0.5, 0, {}}});
  CHECK_THROWS_AS(sgr_calibrate({ScoredDataset{}, 0.1, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(sgr_calibrate({data, 0.0, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(sgr_calibrate({data, 1.0, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(sgr_calibrate({data, 0.1, 0.0}), std::invalid_argument);
  CHECK_NOTHROW(sgr_calibrate({data, 0.5, 0.1}));
}

TEST_CASE("error-free data") {
  std::vector<ScoredExample> ex;
  for (int i = 0; i < 1024; ++i) ex.push_back({i / 1024.0, 0, {}});
  auto clean_bound = [](std::int64_t accepted) {
    return 1.0 - std::pow(1e-4, 1.0 / static_cast<double>(accepted));
  };

  SUBCASE("first probe infeasible sends the search upward") {
    // Half the set (512 clean draws) certifies only 0.0178 at delta/10, and
    // smaller sets certify less, so no probe gets below 0.01.
    const auto report = sgr_calibrate({ScoredDataset(ex), 0.01, 0.001});
    CHECK(report.k_iterations == 10);
    REQUIRE(report.trace.size() == 10);
    CHECK(report.trace[0].z == 513);
    CHECK(report.trace[0].accepted == 512);
    CHECK(std::abs(report.trace[0].bound - 0.017828110811962228) <= 1e-11);
    CHECK_FALSE(report.feasible);
    for (const auto& it : report.trace) {
      CHECK(it.errors == 0);
      CHECK(std::abs(it.bound - clean_bound(it.accepted)) <= 1e-11);
    }
  }
  SUBCASE("distinct kappas reach m - 1") {
    const auto report = sgr_calibrate({ScoredDataset(ex), 0.02, 0.001});
    CHECK(report.feasible);
    // The index search never probes z = 1, so the widest set is m - 1.
    CHECK(report.trace.back().z == 2);
    CHECK(report.train_coverage == 1023.0 / 1024.0);
    constexpr double expected = 0.00896285723699295286;  // 1 - (0.001 / 10)^(1/1023)
    CHECK(std::abs(report.bound - expected) <= 1e-11);
    CHECK(report.train_risk == 0.0);
    for (const auto& it : report.trace) CHECK(std::abs(it.bound - clean_bound(it.accepted)) <= 1e-11);
  }
  SUBCASE("lowest two tied: the widest probe covers everything") {
    ex[0].kappa = ex[1].kappa;
    const auto report = sgr_calibrate({ScoredDataset(ex), 0.02, 0.001});
    CHECK(report.train_coverage == 1.0);
    constexpr double expected = 0.0089541437511391293587;  // 1 - (0.001 / 10)^(1/1024)
    CHECK(std::abs(report.bound - expected) <= 1e-11);
  }
}

TEST_CASE("two examples give one iteration") {
  const auto report = sgr_calibrate({ScoredDataset({{0.2, 1, {}}, {0.8, 0, {}}}), 0.5, 0.4});
  REQUIRE(report.trace.size() == 1);
  CHECK(report.trace[0].z == 2);
  CHECK(report.trace[0].accepted == 1);
  CHECK(report.trace[0].errors == 0);
  // One clean draw at delta 0.4: b* = 0.6, not below 0.5.
  CHECK(report.trace[0].bound == doctest::Approx(0.6).epsilon(1e-11));
  CHECK_FALSE(report.feasible);
}

TEST_CASE("anti-ranked data is infeasible") {
  std::vector<ScoredExample> ex;
  for (int i = 0; i < 100; ++i) ex.push_back({i / 100.0, i >= 50 ? 1 : 0, {}});
  const auto report = sgr_calibrate({ScoredDataset(ex), 0.05, 0.001});
  CHECK_FALSE(report.feasible);
  for (const auto& it : report.trace) CHECK_FALSE(it.feasible);
  const auto highest = std::max_element(report.trace.begin(), report.trace.end(),
                                        [](const auto& a, const auto& b) { return a.theta < b.theta; });
  CHECK(report.theta == highest->theta);
  CHECK(report.bound == solve_b_star(BoundQuery(highest->accepted, highest->errors, 0.001 / 7)).b_star);
  CHECK(report.bound == 1.0);
}

TEST_CASE("trace invariants on random instances") {
  std::mt19937_64 gen(43);
  for (int round = 0; round < 150; ++round) {
    const int m = std::uniform_int_distribution<int>(1, 600)(gen);
    const auto data = random_dataset(gen, m, round % 2 == 0 ? 40 : 1000000);
    const double r_star = std::uniform_real_distribution<double>(0.02, 0.5)(gen);
    const double delta = std::uniform_real_distribution<double>(1e-4, 0.3)(gen);
    const auto report = sgr_calibrate({data, r_star, delta});
    const int k = sgr_iterations(static_cast<std::size_t>(m));
    REQUIRE(report.trace.size() == static_cast<std::size_t>(k));
    CHECK(report.k_iterations == k);

    std::int64_t z_min = 1;
    std::int64_t z_max = m;
    for (const auto& it : report.trace) {
      CHECK(it.z == (z_min + z_max + 1) / 2);
      CHECK(it.z >= 1);
      CHECK(it.z <= m);
      const auto metrics = selective_metrics(data, Threshold{it.theta});
      CHECK(it.accepted == metrics.accepted);
      CHECK(it.errors == metrics.errors_accepted);
      CHECK(it.accepted >= m - it.z + 1);
      CHECK(it.bound == solve_b_star(BoundQuery(it.accepted, it.errors, delta / k)).b_star);
      CHECK(it.feasible == (it.bound < r_star));
      if (delta / k < 0.5) CHECK(it.bound >= it.train_risk);
      const auto width = z_max - z_min;
      (it.feasible ? z_max : z_min) = it.z;
      CHECK(z_min <= z_max);
      CHECK(z_max - z_min <= width);
    }

    if (report.feasible) {
      CHECK(report.bound < r_star);
      CHECK(report.bound >= report.train_risk);
    }
    const auto& last = report.trace.back();
    if (last.feasible) CHECK(report.train_coverage >= last.train_coverage);
    const bool any_feasible =
        std::any_of(report.trace.begin(), report.trace.end(), [](const auto& it) { return it.feasible; });
    CHECK(report.feasible == any_feasible);
  }
}

TEST_CASE("determinism and input-order independence") {
  std::mt19937_64 gen(47);
  for (int round = 0; round < 30; ++round) {
    const auto data = random_dataset(gen, 300, 25);
    const auto a = sgr_calibrate({data, 0.15, 0.01});
    const auto b = sgr_calibrate({data, 0.15, 0.01});
    std::vector<ScoredExample> shuffled(data.examples().begin(), data.examples().end());
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    const auto c = sgr_calibrate({ScoredDataset(shuffled), 0.15, 0.01});
    for (const auto* other : {&b, &c}) {
      CHECK(other->theta == a.theta);
      CHECK(other->bound == a.bound);
      CHECK(other->train_coverage == a.train_coverage);
      REQUIRE(other->trace.size() == a.trace.size());
      for (std::size_t i = 0; i < a.trace.size(); ++i) {
        CHECK(other->trace[i].theta == a.trace[i].theta);
        CHECK(other->trace[i].bound == a.trace[i].bound);
      }
    }
  }
}

TEST_CASE("coverage is monotone in the target risk") {
  std::mt19937_64 gen(53);
  for (int round = 0; round < 40; ++round) {
    const auto data = random_dataset(gen, 800, 1000000);
    double previous = -1.0;
    for (double r : {0.02, 0.04, 0.06, 0.08, 0.1, 0.15, 0.2, 0.3}) {
      const auto report = sgr_calibrate({data, r, 0.001});
      if (report.feasible) {
        CHECK(report.train_coverage >= previous);
        previous = report.train_coverage;
      }
    }
  }
}

TEST_CASE("evaluate") {
  std::mt19937_64 gen(59);
  const auto data = random_dataset(gen, 500, 1000000);
  const auto report = sgr_calibrate({data, 0.2, 0.01});
  const auto self = evaluate(report, data);
  CHECK(self.risk == report.train_risk);
  CHECK(self.coverage == report.train_coverage);

  const auto rejected = evaluate(report, ScoredDataset({{report.theta - 1.0, 0, {}}}));
  CHECK(rejected.degenerate);
  CHECK(rejected.accepted == 0);
  CHECK_THROWS_AS(evaluate(report, ScoredDataset{}), std::invalid_argument);
}
