#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "gridplan/scenario.hpp"
#include "gridplan/system_io.hpp"
#include "helpers.hpp"

using namespace gridplan;

namespace {

HourlyTable table(std::vector<std::string> zones, std::vector<double> values) {
  HourlyTable t;
  t.zones = std::move(zones);
  t.values = std::move(values);
  return t;
}

DailyVector vec(int day, std::vector<double> v) { return {day, std::move(v)}; }

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

// In-test synthetic model with a deterministic 8760-hour demand series.
SystemModel synthetic_year_model(int epochs) {
  SystemModel m;
  m.name = "synth";
  m.config.epochs = epochs;
  m.config.years_per_epoch = 5;
  m.config.load_growth = 0.02;
  m.zones = {{"A", ZoneKind::Onshore, std::nullopt, std::nullopt},
             {"B", ZoneKind::Onshore, std::nullopt, std::nullopt}};
  Generator g;
  g.id = "G";
  g.zone = "A";
  g.tech = "gas";
  g.p_max_mw = 500;
  g.ramp_mw_per_hour = 500;
  g.var_cost_per_mwh = 30;
  g.externality_rates = {{"co2", 0.4}, {"air_quality", 15.42}};
  m.generators = {g};
  HourlyTable d;
  d.zones = {"A", "B"};
  for (int day = 0; day < 365; ++day)
    for (int h = 0; h < 24; ++h) {
      const double season = std::sin(2 * M_PI * day / 365.0);
      d.values.push_back(100 + 40 * season + 10 * std::sin(2 * M_PI * h / 24.0) +
                         0.05 * day);
      d.values.push_back(80 + 30 * season + 12 * std::cos(2 * M_PI * h / 24.0) +
                         0.03 * day);
    }
  m.demand = d;
  return m;
}

}  // namespace

TEST_CASE("net load slicing and normalization") {
  SECTION("zero renewables leaves normalized load") {
    auto load = table({"A"}, std::vector<double>(48, 0.0));
    for (int h = 0; h < 48; ++h) load.values[h] = h + 1.0;
    auto zero = table({"A"}, std::vector<double>(48, 0.0));
    auto days = compute_net_load(load, zero);
    REQUIRE(days.size() == 2);
    CHECK(days[0].day_index == 1);
    CHECK(days[1].values[23] == Catch::Approx(1.0));
    CHECK(days[0].values[0] == Catch::Approx(1.0 / 48.0));
  }
  SECTION("load equal to renewables is all zeros") {
    auto load = table({"A", "B"}, std::vector<double>(96, 5.0));
    auto days = compute_net_load(load, load);
    for (const auto& d : days)
      for (double v : d.values) CHECK(v == 0.0);
  }
  SECTION("two-zone two-day series against hand recomputation") {
    const std::vector<std::string> zones{"A", "B"};
    HourlyTable load = table(zones, {}), ren = table(zones, {});
    for (int h = 0; h < 48; ++h) {
      load.values.push_back(200 + 3.0 * h);
      load.values.push_back(150 - 1.0 * h);
      ren.values.push_back(20 + 0.5 * h);
      ren.values.push_back(5.0);
    }
    auto days = compute_net_load(load, ren);
    // Independent recomputation, scalar by scalar.
    double max_abs = 0;
    for (int h = 0; h < 48; ++h) {
      max_abs = std::max(max_abs, std::abs((200 + 3.0 * h) - (20 + 0.5 * h)));
      max_abs = std::max(max_abs, std::abs((150 - 1.0 * h) - 5.0));
    }
    REQUIRE(days.size() == 2);
    for (int d = 0; d < 2; ++d)
      for (int h = 0; h < 24; ++h) {
        const int t = d * 24 + h;
        CHECK(days[d].values[h * 2 + 0] ==
              Catch::Approx(((200 + 3.0 * t) - (20 + 0.5 * t)) / max_abs));
        CHECK(days[d].values[h * 2 + 1] ==
              Catch::Approx(((150 - 1.0 * t) - 5.0) / max_abs));
      }
  }
  SECTION("mismatched series are rejected") {
    auto a = table({"A"}, std::vector<double>(24, 1.0));
    auto b = table({"A"}, std::vector<double>(48, 1.0));
    CHECK_THROWS_AS(compute_net_load(a, b), ModelError);
  }
}

TEST_CASE("kmeans basics") {
  SECTION("identical vectors collapse to one cluster") {
    std::vector<DailyVector> vs;
    for (int i = 0; i < 8; ++i) vs.push_back(vec(i + 1, {1.0, 2.0}));
    auto km = kmeans(vs, 1, 42);
    for (int a : km.assignment) CHECK(a == 0);
    CHECK_THROWS_AS(kmeans(vs, 2, 42), ModelError);  // only one distinct vector
  }
  SECTION("two well-separated clouds recover the optimal 2-partition") {
    std::vector<DailyVector> vs;
    const std::vector<std::pair<double, double>> pts = {
        {0.1, 0.0},  {-0.1, 0.05}, {0.0, -0.1},  {0.05, 0.1},
        {10.1, 9.9}, {9.9, 10.05}, {10.0, 9.85}, {10.05, 10.1},
        {0.12, -0.02}, {9.95, 10.02}, {-0.05, -0.05}, {10.08, 9.94}};
    for (size_t i = 0; i < pts.size(); ++i)
      vs.push_back(vec(static_cast<int>(i + 1), {pts[i].first, pts[i].second}));

    // Brute-force optimal 2-partition by total within-cluster squared error.
    double best_sse = 1e300;
    unsigned best_mask = 0;
    const int n = static_cast<int>(vs.size());
    for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
      double sse = 0;
      for (int side = 0; side < 2; ++side) {
        std::vector<double> mean(2, 0.0);
        int cnt = 0;
        for (int i = 0; i < n; ++i)
          if (((mask >> i) & 1u) == static_cast<unsigned>(side)) {
            mean[0] += vs[i].values[0];
            mean[1] += vs[i].values[1];
            ++cnt;
          }
        if (cnt == 0) continue;
        mean[0] /= cnt;
        mean[1] /= cnt;
        for (int i = 0; i < n; ++i)
          if (((mask >> i) & 1u) == static_cast<unsigned>(side))
            sse += sq_dist(vs[i].values, mean);
      }
      if (sse < best_sse) {
        best_sse = sse;
        best_mask = mask;
      }
    }
    auto km = kmeans(vs, 2, 3);
    std::set<int> group0, group0_want;
    for (int i = 0; i < n; ++i) {
      if (km.assignment[i] == km.assignment[0]) group0.insert(i);
      if (((best_mask >> i) & 1u) == (best_mask & 1u)) group0_want.insert(i);
    }
    const bool same = group0 == group0_want;
    std::set<int> complement;
    for (int i = 0; i < n; ++i)
      if (!group0_want.count(i)) complement.insert(i);
    CHECK((same || group0 == complement));
  }
  SECTION("fixed seed is reproducible") {
    std::vector<DailyVector> vs;
    std::uint64_t s = 99;
    for (int i = 0; i < 40; ++i) {
      std::vector<double> v(6);
      for (auto& x : v) x = gridplan::detail::u01(s) * 10.0;
      vs.push_back(vec(i + 1, v));
    }
    auto a = kmeans(vs, 4, 7);
    auto b = kmeans(vs, 4, 7);
    CHECK(a.assignment == b.assignment);
    CHECK(a.centroids == b.centroids);
    // Every cluster must be populated.
    std::set<int> used(a.assignment.begin(), a.assignment.end());
    CHECK(used.size() == 4);
  }
}

TEST_CASE("representative day selection") {
  SECTION("singleton cluster without extremes keeps the day at weight 1") {
    std::vector<DailyVector> vs{vec(5, {1.0, 1.0})};
    auto km = kmeans(vs, 1, 0);
    auto sel = select_representative_days(km, vs, false);
    REQUIRE(sel.size() == 1);
    CHECK(sel[0].normal_day == 5);
    CHECK(sel[0].normal_weight == 1.0);
    CHECK(sel[0].extreme_day == -1);
  }
  SECTION("ten-day toy matches an exhaustive nearest/farthest scan") {
    std::vector<DailyVector> vs;
    std::uint64_t s = 5;
    for (int i = 0; i < 10; ++i) {
      std::vector<double> v(4);
      for (auto& x : v) x = gridplan::detail::u01(s);
      vs.push_back(vec(i + 1, v));
    }
    auto km = kmeans(vs, 2, 11);
    auto sel = select_representative_days(km, vs, true);
    for (const auto& cl : sel) {
      int want_near = -1, want_far = -1, size = 0;
      double dn = 1e300, df = -1;
      for (int i = 0; i < 10; ++i) {
        if (km.assignment[i] != cl.cluster) continue;
        ++size;
        double d = sq_dist(vs[i].values, km.centroids[cl.cluster]);
        if (d < dn) {
          dn = d;
          want_near = vs[i].day_index;
        }
        if (d > df) {
          df = d;
          want_far = vs[i].day_index;
        }
      }
      CHECK(cl.extreme_day == want_far);
      if (size > 1) {
        CHECK(cl.normal_day == want_near);
        CHECK(cl.normal_weight == size - 1);
      }
    }
  }
}

TEST_CASE("scenario construction over a synthetic year") {
  SystemModel m = synthetic_year_model(2);

  SECTION("k=5 with extremes: ten days, weights conserve tau, extremes weigh 1") {
    auto set = build_scenarios(m, 5, true, 123);
    REQUIRE(set.epochs.size() == 2);
    for (const auto& days : set.epochs) {
      int normals = 0, extremes = 0;
      double total = 0;
      for (const auto& d : days) {
        total += d.weight;
        if (d.kind == ScenarioDay::Kind::Extreme) {
          ++extremes;
          CHECK(d.weight == 1.0);
        } else {
          ++normals;
          CHECK(d.weight >= 1.0);
        }
      }
      CHECK(normals == 5);
      CHECK(extremes == 5);
      CHECK(total == Catch::Approx(365.0));
    }
    CHECK(check_scenarios(set, 365).empty());
  }
  SECTION("weight conservation also holds without extremes") {
    auto set = build_scenarios(m, 3, false, 9);
    for (const auto& days : set.epochs) {
      double total = 0;
      for (const auto& d : days) total += d.weight;
      CHECK(total == Catch::Approx(365.0));
    }
  }
  SECTION("selected day rows are copied verbatim from the scaled source year") {
    auto set = build_scenarios(m, 4, true, 77);
    const auto& days = set.epochs[1];
    const double growth = std::pow(1.02, 2 * 5);
    for (const auto& d : days) {
      for (int h = 0; h < 24; ++h)
        for (int z = 0; z < 2; ++z)
          CHECK(d.load.at(h, z) ==
                m.demand->at((d.source_day - 1) * 24 + h, z) * growth);
    }
  }
  SECTION("identical inputs and seed give identical scenario sets") {
    auto a = scenarios_to_json(build_scenarios(m, 5, true, 123)).dump();
    auto b = scenarios_to_json(build_scenarios(m, 5, true, 123)).dump();
    CHECK(a == b);
  }
  SECTION("different seeds may pick different days but stay valid") {
    auto set = build_scenarios(m, 5, true, 321);
    CHECK(check_scenarios(set, 365).empty());
  }
}

TEST_CASE("scenario files round-trip") {
  auto set = load_scenarios(testutil::data_dir() / "toys/enum/scenarios.json");
  CHECK(set.hours_per_day == 4);
  REQUIRE(set.epochs.size() == 2);
  CHECK(check_scenarios(set, 365).empty());

  auto dir = testutil::scratch_dir("scen");
  save_scenarios(set, dir / "copy.json");
  auto again = load_scenarios(dir / "copy.json");
  CHECK(scenarios_to_json(set).dump() == scenarios_to_json(again).dump());
}

TEST_CASE("clustered scenarios from the ISO-NE shaped fixture") {
  SystemModel m = load_system(testutil::data_dir() / "isone/system_fixed.json");
  REQUIRE(m.demand.has_value());
  auto set = build_scenarios(m, 5, true, 2024);
  REQUIRE(set.epochs.size() == 4);
  for (const auto& days : set.epochs) {
    double total = 0;
    int extremes = 0;
    for (const auto& d : days) {
      total += d.weight;
      extremes += d.kind == ScenarioDay::Kind::Extreme;
    }
    CHECK(total == Catch::Approx(365.0));
    CHECK(extremes == 5);
  }
  CHECK(check_scenarios(set, 365).empty());
}
