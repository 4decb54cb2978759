#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gridplan/bnb.hpp"
#include "gridplan/builder.hpp"
#include "gridplan/system_io.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace gridplan;

namespace {

struct ToyProgram {
  SystemModel model;
  ScenarioSet scenarios;
  MilpInstance inst;
};

ToyProgram load_enum_toy(PlanMode mode = PlanMode::MultiObjective) {
  ToyProgram t;
  t.model = load_system(testutil::data_dir() / "toys/enum/system.json");
  t.scenarios = load_scenarios(testutil::data_dir() / "toys/enum/scenarios.json");
  t.inst = build_program(t.model, t.scenarios, {mode, {}});
  return t;
}

// Enumerates every investment pattern of the toy: each candidate line either
// stays unbuilt or picks one (type, epoch). Availability binaries follow from
// the pattern; each pattern is an LP with all binaries fixed.
struct EnumResult {
  double objective = kInf;
  int lp_count = 0;
  int pattern_count = 0;
};

EnumResult enumerate_toy(const ToyProgram& t) {
  const auto& m = t.model;
  const int Y = m.config.epochs;
  struct Cand {
    std::string line;
    std::vector<std::string> types;
  };
  std::vector<Cand> cands;
  for (const auto& l : m.lines)
    if (l.status == LineStatus::Candidate) cands.push_back({l.id, l.allowed_types});

  // Options per line: 0 = skip, else (type, epoch).
  std::vector<int> option_count;
  for (const auto& c : cands)
    option_count.push_back(1 + static_cast<int>(c.types.size()) * Y);

  LpProblem base = LpProblem::from_instance(t.inst);
  EnumResult out;
  std::vector<int> choice(cands.size(), 0);
  while (true) {
    ++out.pattern_count;
    std::vector<double> lo = base.lo, hi = base.hi;
    bool structurally_ok = true;
    for (size_t ci = 0; ci < cands.size(); ++ci) {
      for (size_t ti = 0; ti < cands[ci].types.size(); ++ti)
        for (int y = 0; y < Y; ++y) {
          const int iv = t.inst.require(names::invest(y, cands[ci].line, cands[ci].types[ti]));
          const int built_at = choice[ci] == 0
                                   ? -1
                                   : (choice[ci] - 1) % Y;
          const int built_type = choice[ci] == 0
                                     ? -1
                                     : (choice[ci] - 1) / Y;
          const double vi =
              (static_cast<int>(ti) == built_type && y == built_at) ? 1.0 : 0.0;
          lo[iv] = hi[iv] = vi;
          const int zv = t.inst.require(names::avail(y, cands[ci].line, cands[ci].types[ti]));
          double z = 0.0;
          if (static_cast<int>(ti) == built_type && built_at <= y) z = 1.0;
          lo[zv] = hi[zv] = z;
        }
    }
    // Offshore zones need an available incident line from their online epoch.
    for (const auto& z : m.zones) {
      if (z.kind != ZoneKind::Offshore) continue;
      for (int y = *z.online_epoch; y < Y; ++y) {
        double have = 0.0;
        for (size_t ci = 0; ci < cands.size(); ++ci) {
          const Line* l = nullptr;
          for (const auto& ml : m.lines)
            if (ml.id == cands[ci].line) l = &ml;
          if (l->from_zone != z.id && l->to_zone != z.id) continue;
          if (choice[ci] != 0 && (choice[ci] - 1) % Y <= y) have += 1.0;
        }
        if (have < 1.0) structurally_ok = false;
      }
    }
    if (structurally_ok) {
      ++out.lp_count;
      auto lp = solve_lp(base, lo, hi);
      if (lp.status == SolveStatus::Optimal) out.objective = std::min(out.objective, lp.objective);
    }
    // Next pattern.
    size_t ci = 0;
    while (ci < choice.size()) {
      if (++choice[ci] < option_count[ci]) break;
      choice[ci] = 0;
      ++ci;
    }
    if (ci == choice.size()) break;
  }
  return out;
}

}  // namespace

TEST_CASE("all binaries fixed reduces to a single LP") {
  auto t = load_enum_toy();
  for (auto& v : t.inst.vars)
    if (v.kind == VarKind::Binary) {
      // Build line C1 as ac-150 in epoch 1; keep everything else at zero.
      const bool on = v.name == names::invest(0, "C1", "ac-150") ||
                      v.name == names::avail(0, "C1", "ac-150") ||
                      v.name == names::avail(1, "C1", "ac-150");
      v.lo = v.hi = on ? 1.0 : 0.0;
    }
  auto sol = solve_milp(t.inst, {0.0, 1000, {}});
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.nodes == 1);
  CHECK(sol.gap == 0.0);
}

TEST_CASE("branch and bound equals exhaustive enumeration on the toy") {
  auto t = load_enum_toy();
  auto enumerated = enumerate_toy(t);
  REQUIRE(enumerated.lp_count > 0);
  INFO("patterns=" << enumerated.pattern_count << " lps=" << enumerated.lp_count);

  auto sol = solve_milp(t.inst, {0.0, 100000, {}});
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(std::abs(sol.objective - enumerated.objective) <=
        1e-6 * std::max(1.0, std::abs(enumerated.objective)));

  SECTION("bound history is non-decreasing and ends at the incumbent") {
    for (size_t i = 1; i < sol.bound_history.size(); ++i)
      CHECK(sol.bound_history[i] >= sol.bound_history[i - 1] - 1e-9);
    CHECK(sol.best_bound <= sol.objective + 1e-9);
  }
  SECTION("binaries are integral") {
    for (size_t j = 0; j < t.inst.vars.size(); ++j)
      if (t.inst.vars[j].kind == VarKind::Binary)
        CHECK(std::abs(sol.values[j] - std::round(sol.values[j])) <= kIntTol);
  }
}

TEST_CASE("loose gap still lands within the stated distance of the optimum") {
  auto t = load_enum_toy();
  auto enumerated = enumerate_toy(t);
  auto sol = solve_milp(t.inst, {0.1, 100000, {}});
  REQUIRE((sol.status == SolveStatus::Optimal || sol.status == SolveStatus::GapFeasible));
  CHECK(sol.objective >= enumerated.objective - 1e-6);
  CHECK(sol.objective <= enumerated.objective * 1.1 + 1e-6);
  CHECK(sol.gap <= 0.1 + 1e-12);
}

TEST_CASE("deterministic incumbent for fixed inputs") {
  auto t = load_enum_toy();
  auto a = solve_milp(t.inst, {1e-4, 100000, {}});
  auto b = solve_milp(t.inst, {1e-4, 100000, {}});
  CHECK(a.objective == b.objective);
  CHECK(a.values == b.values);
  CHECK(a.nodes == b.nodes);
}

TEST_CASE("random binary knapsacks match brute force") {
  std::uint64_t state = 11;
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 10;
    std::vector<double> value(n), weight(n);
    double cap = 0;
    for (int j = 0; j < n; ++j) {
      value[j] = 1.0 + 9.0 * oracle::u01(state);
      weight[j] = 1.0 + 9.0 * oracle::u01(state);
      cap += weight[j];
    }
    cap *= 0.4;

    MilpInstance inst;
    for (int j = 0; j < n; ++j) {
      int v = inst.add_var("b" + std::to_string(j), VarKind::Binary, 0, 1);
      inst.add_objective(v, -value[j]);  // maximize value
    }
    auto& r = inst.add_row("capacity", "capacity", 'L', cap);
    for (int j = 0; j < n; ++j) r.coeffs.push_back({j, weight[j]});

    double best = 0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      double w = 0, val = 0;
      for (int j = 0; j < n; ++j)
        if (mask >> j & 1u) {
          w += weight[j];
          val += value[j];
        }
      if (w <= cap) best = std::max(best, val);
    }
    auto sol = solve_milp(inst, {0.0, 100000, {}});
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(-sol.objective == Catch::Approx(best).margin(1e-7));
  }
}

TEST_CASE("structurally infeasible toys report infeasible") {
  MilpInstance inst;
  int b = inst.add_var("b", VarKind::Binary, 0, 1);
  auto& r = inst.add_row("need2", "t", 'G', 2.0);
  r.coeffs = {{b, 1.0}};
  CHECK(solve_milp(inst, {0.0, 100, {}}).status == SolveStatus::Infeasible);
}
