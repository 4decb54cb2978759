#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "gridplan/system_io.hpp"
#include "helpers.hpp"

using namespace gridplan;

namespace {

bool has_violation(const std::vector<Violation>& vs, const std::string& rule_substr) {
  for (const auto& v : vs)
    if (v.rule.find(rule_substr) != std::string::npos) return true;
  return false;
}

const char* kMinimalSystem = R"({
  "name": "minimal",
  "config": {"epochs": 1, "years_per_epoch": 1},
  "zones": [{"id": "A", "kind": "onshore"}],
  "generators": [
    {"id": "G", "zone": "A", "tech": "gas", "dispatchable": true, "status": "existing",
     "p_min_mw": 0, "p_max_mw": 100, "ramp_mw_per_hour": 100,
     "var_cost_per_mwh": 30, "externality_rates": {"co2": 0.4, "air_quality": 15.42}}
  ]
})";

}  // namespace

TEST_CASE("minimal one-zone system loads") {
  auto dir = testutil::scratch_dir("min");
  testutil::write_file(dir / "sys.json", kMinimalSystem);
  SystemModel m = load_system(dir / "sys.json");
  CHECK(m.zones.size() == 1);
  CHECK(m.generators.size() == 1);
  CHECK(validate_system(m).empty());
}

TEST_CASE("dangling zone reference is rejected") {
  auto dir = testutil::scratch_dir("dangle");
  std::string body = R"({
    "config": {"epochs": 1, "years_per_epoch": 1},
    "zones": [{"id": "A"}, {"id": "B"}],
    "line_types": [{"id": "t", "capacity_mw": 100, "cost": {"model": "fixed_per_line", "c0": 1}}],
    "lines": [{"id": "L", "from": "A", "to": "NOPE", "current": "dc", "status": "existing",
               "capacity_mw": 100}]
  })";
  testutil::write_file(dir / "sys.json", body);
  CHECK_THROWS_WITH(load_system(dir / "sys.json"),
                    Catch::Matchers::ContainsSubstring("unknown zone"));
}

TEST_CASE("malformed json reports a parse error") {
  auto dir = testutil::scratch_dir("badjson");
  testutil::write_file(dir / "sys.json", "{ \"zones\": [ }");
  CHECK_THROWS_AS(load_system(dir / "sys.json"), ParseError);
}

TEST_CASE("validate_system flags named invariants") {
  auto dir = testutil::scratch_dir("viol");
  testutil::write_file(dir / "sys.json", kMinimalSystem);
  SystemModel m = load_system(dir / "sys.json");

  SECTION("valid model yields no violations, idempotently") {
    CHECK(validate_system(m).empty());
    CHECK(validate_system(m).empty());
  }
  SECTION("offshore zone without any line") {
    m.zones.push_back({"F", ZoneKind::Offshore, 0, std::nullopt});
    auto vs = validate_system(m);
    CHECK(has_violation(vs, "offshore unreachable"));
  }
  SECTION("storage dod out of range") {
    StorageSpec s;
    s.power_capex_per_mw = {1.0};
    s.energy_capex_per_mwh = {1.0};
    s.fixed_om_per_mw_yr = {0.0};
    s.eta_charge = s.eta_discharge = 0.9;
    s.dod = 1.2;
    s.soc_init = 1.2;
    s.duration_hours = 4;
    s.lifetime_years = 10;
    m.storage = s;
    CHECK(has_violation(validate_system(m), "dod out of range"));
  }
  SECTION("onshore zone with online_epoch") {
    m.zones[0].online_epoch = 0;
    CHECK(has_violation(validate_system(m), "must not set online_epoch"));
  }
  SECTION("demand block shares must sum to one") {
    m.demand_blocks = {{"b1", 100.0, 0.6}, {"b2", 200.0, 0.6}};
    CHECK(has_violation(validate_system(m), "shares must sum to 1"));
  }
  SECTION("intermittent generator needs a profile and zero p_min") {
    m.generators[0].dispatchable = false;
    m.generators[0].p_min_mw = 10.0;
    auto vs = validate_system(m);
    CHECK(has_violation(vs, "requires a profile"));
    CHECK(has_violation(vs, "p_min = 0"));
  }
  SECTION("big_m must dominate candidate susceptances") {
    m.zones.push_back({"B", ZoneKind::Onshore, std::nullopt, std::nullopt});
    m.line_types.push_back({"t", 100.0, LineCostModel::FixedPerLine, 1.0, 0, 0, 0});
    Line c;
    c.id = "C";
    c.from_zone = "A";
    c.to_zone = "B";
    c.status = LineStatus::Candidate;
    c.susceptance = 1000.0;
    c.allowed_types = {"t"};
    m.lines.push_back(c);
    m.config.big_m = 100.0;  // far below 1000 * 2*pi
    CHECK(has_violation(validate_system(m), "big_m"));
  }
}

TEST_CASE("enum toy fixture loads and round-trips") {
  SystemModel m = load_system(testutil::data_dir() / "toys/enum/system.json");
  CHECK(m.zones.size() == 3);
  CHECK(m.lines.size() == 3);
  CHECK(validate_system(m).empty());

  auto dir = testutil::scratch_dir("rt");
  save_system(m, dir / "copy.json");
  SystemModel again = load_system(dir / "copy.json");
  CHECK(system_fingerprint(m) == system_fingerprint(again));
}

TEST_CASE("ISO-NE shaped fixtures") {
  SECTION("fixed-POI variant keeps the split offtake as two zones") {
    SystemModel m = load_system(testutil::data_dir() / "isone/system_fixed.json");
    int offshore = 0;
    for (const auto& z : m.zones) offshore += z.kind == ZoneKind::Offshore;
    CHECK(m.zones.size() == 15);
    CHECK(offshore == 7);
    double rev = 0.0;
    for (const auto& g : m.generators)
      if (g.zone == "REV_CT" || g.zone == "REV_RI") rev += g.p_max_mw;
    CHECK(rev == 704.0);
  }
  SECTION("single-offtake variant has six offshore zones") {
    SystemModel m = load_system(testutil::data_dir() / "isone/system_opoi.json");
    int offshore = 0;
    for (const auto& z : m.zones) offshore += z.kind == ZoneKind::Offshore;
    CHECK(offshore == 6);
    std::map<std::string, double> cap;
    for (const auto& g : m.generators)
      if (!g.dispatchable && m.find_zone(g.zone)->kind == ZoneKind::Offshore)
        cap[g.zone] += g.p_max_mw;
    CHECK(cap["REV"] == 704.0);
    CHECK(cap["VINE"] == 800.0);
    CHECK(cap["PKCTY"] == 800.0);
    CHECK(cap["COMW"] == 1232.0);
    CHECK(cap["MFLR1"] == 804.0);
    CHECK(cap["MFLR2"] == 400.0);
  }
  SECTION("PJM shaped fixture loads") {
    SystemModel m = load_system(testutil::data_dir() / "pjm/system.json");
    CHECK(validate_system(m).empty());
    CHECK(m.config.epochs == 4);
  }
}
