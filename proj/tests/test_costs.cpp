#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "gridplan/costs.hpp"

using namespace gridplan;

namespace {

// Independent cash-flow ledger: every build pays CRF*cost annually for its
// lifetime, discounted by asset age; payments are bucketed by epoch. Kept
// deliberately separate from the library's accumulation order.
std::vector<double> ledger_investment(const std::vector<double>& builds,
                                      const std::vector<double>& cost, int lifetime,
                                      double r, int epochs, int years_per_epoch) {
  const int horizon = epochs * years_per_epoch;
  std::vector<double> annual(horizon, 0.0);
  const double g = std::pow(1.0 + r, lifetime);
  const double recovery = r * g / (g - 1.0);
  for (int n = 0; n < epochs; ++n) {
    const int build_year = n * years_per_epoch + 1;
    for (int age = 1; age <= lifetime; ++age) {
      const int t = build_year + age - 1;
      if (t > horizon) break;
      annual[t - 1] += recovery * cost[n] * builds[n] / std::pow(1.0 + r, age - 1);
    }
  }
  std::vector<double> per_epoch(epochs, 0.0);
  for (int t = 0; t < horizon; ++t) per_epoch[t / years_per_epoch] += annual[t];
  return per_epoch;
}

}  // namespace

TEST_CASE("capital recovery factor") {
  // Frozen from a high-precision evaluation of the annuity formula.
  CHECK(crf(0.05, 20) == Catch::Approx(0.0802425871906913).epsilon(1e-12));
  CHECK(crf(0.05, 30) == Catch::Approx(0.0650514350802766).epsilon(1e-12));

  for (double r : {0.01, 0.05, 0.2, 1.0})
    CHECK(crf(r, 1) == Catch::Approx(1.0 + r).epsilon(1e-14));

  CHECK_THROWS_AS(crf(0.0, 20), std::invalid_argument);
  CHECK_THROWS_AS(crf(-0.05, 20), std::invalid_argument);
  CHECK_THROWS_AS(crf(0.05, 0), std::invalid_argument);
}

TEST_CASE("discount factor with lifetime cutoff") {
  CHECK(discount_factor(1, 20, 0.05) == 1.0);
  CHECK(discount_factor(21, 20, 0.05) == 0.0);
  CHECK(discount_factor(6, 20, 0.05) == Catch::Approx(0.7835261664684590).epsilon(1e-12));
  CHECK_THROWS_AS(discount_factor(0, 20, 0.05), std::invalid_argument);
}

TEST_CASE("annualized investment equals brute-force annual ledger") {
  SECTION("zero builds") {
    EpochStructure es{4, 5};
    auto ic = annualized_investment({0, 0, 0, 0}, {1, 1, 1, 1}, 20, 0.05, es);
    for (double v : ic) CHECK(v == 0.0);
  }
  SECTION("single one-year epoch collapses to CRF") {
    EpochStructure es{1, 1};
    auto ic = annualized_investment({1.0}, {1.0}, 20, 0.05, es);
    REQUIRE(ic.size() == 1);
    CHECK(ic[0] == Catch::Approx(crf(0.05, 20)).epsilon(1e-12));
  }
  SECTION("two five-year epochs, build in epoch 1") {
    EpochStructure es{2, 5};
    std::vector<double> builds{100.0, 0.0};
    std::vector<double> cost{1e6, 1e6};
    auto ic = annualized_investment(builds, cost, 20, 0.05, es);
    auto want = ledger_investment(builds, cost, 20, 0.05, 2, 5);
    REQUIRE(ic.size() == want.size());
    for (size_t i = 0; i < ic.size(); ++i)
      CHECK(ic[i] == Catch::Approx(want[i]).epsilon(1e-10));
  }
  SECTION("staggered builds with short lifetime") {
    // Lifetime shorter than the horizon exercises the availability cutoff.
    EpochStructure es{4, 5};
    std::vector<double> builds{10.0, 0.0, 25.0, 5.0};
    std::vector<double> cost{4.0, 3.5, 3.0, 2.5};
    auto ic = annualized_investment(builds, cost, 8, 0.07, es);
    auto want = ledger_investment(builds, cost, 8, 0.07, 4, 5);
    for (size_t i = 0; i < ic.size(); ++i)
      CHECK(ic[i] == Catch::Approx(want[i]).margin(1e-9));
  }
}

TEST_CASE("epoch structure discount sums") {
  EpochStructure es{2, 5};
  CHECK(es.first_year(0) == 1);
  CHECK(es.first_year(1) == 6);
  CHECK(es.total_years() == 10);

  double want = 0.0;
  for (int y = 6; y <= 10; ++y) want += std::pow(1.05, -(y - 1));
  CHECK(es.operating_discount_sum(1, 0.05) == Catch::Approx(want).epsilon(1e-13));

  EpochStructure one{1, 1};
  CHECK(one.operating_discount_sum(0, 0.05) == 1.0);
}

TEST_CASE("offshore cable cost curves") {
  CHECK(offshore_cable_cost(0.0, "hvac-400") == 40.13);
  CHECK(offshore_cable_cost(0.0, "hvdc-1400") == 448.58);
  CHECK(offshore_cable_cost(0.0, "hvdc-2200") == 687.44);
  CHECK(offshore_cable_cost(100.0, "hvdc-1400") == Catch::Approx(716.21).epsilon(1e-12));
  CHECK(offshore_cable_cost(20.0, "hvac-400") ==
        Catch::Approx(0.0229 * 400.0 + 1.5093 * 20.0 + 40.13).epsilon(1e-12));
  CHECK_THROWS_AS(offshore_cable_cost(10.0, "hvdc-9000"), std::invalid_argument);
  CHECK_THROWS_AS(offshore_cable_cost(-1.0, "hvac-400"), std::invalid_argument);
}

TEST_CASE("onshore reinforcement cost") {
  CHECK(onshore_line_cost(0.0, 50.0, 3888.5) == 0.0);
  CHECK(onshore_line_cost(1000.0, 50.0, 3888.5) == 194425000.0);
  CHECK(onshore_line_cost(1000.0, 50.0, 1499.85) == 74992500.0);
}

TEST_CASE("line capital cost models") {
  LineType fixed{"f", 500.0, LineCostModel::FixedPerLine, 12.5, 0, 0, 0};
  CHECK(line_capital_cost(fixed, 99.0) == 12.5e6);

  LineType permw{"u", 800.0, LineCostModel::PerMwMile, 0, 0, 0, 3888.5};
  CHECK(line_capital_cost(permw, 10.0) == Catch::Approx(800.0 * 10.0 * 3888.5));

  // Non-decreasing in length on a sample grid for every model.
  for (const auto& t : standard_cable_types()) {
    double prev = -1.0;
    for (double l : {0.0, 5.0, 17.0, 60.0, 150.0}) {
      double c = line_capital_cost(t, l);
      CHECK(c >= prev);
      prev = c;
    }
  }
}
