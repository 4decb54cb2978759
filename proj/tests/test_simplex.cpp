#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gridplan/builder.hpp"
#include "gridplan/simplex.hpp"
#include "gridplan/system_io.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace gridplan;

namespace {

// Build a MilpInstance directly for small hand LPs.
struct LpSpec {
  MilpInstance inst;
  int var(const std::string& n, double lo, double hi, double cost) {
    int v = inst.add_var(n, VarKind::Continuous, lo, hi);
    inst.add_objective(v, cost);
    return v;
  }
  void row(char sense, double rhs, std::vector<std::pair<int, double>> coeffs) {
    auto& r = inst.add_row("r" + std::to_string(inst.rows.size()), "t", sense, rhs);
    r.coeffs = std::move(coeffs);
  }
};

// Max violation of rows and bounds at x.
double primal_residual(const MilpInstance& inst, const std::vector<double>& x) {
  double worst = 0.0;
  for (size_t j = 0; j < inst.vars.size(); ++j) {
    worst = std::max(worst, inst.vars[j].lo - x[j]);
    worst = std::max(worst, x[j] - inst.vars[j].hi);
  }
  for (const auto& r : inst.rows) {
    double a = 0.0;
    for (const auto& [j, c] : r.coeffs) a += c * x[j];
    if (r.sense == 'L') worst = std::max(worst, a - r.rhs);
    if (r.sense == 'G') worst = std::max(worst, r.rhs - a);
    if (r.sense == 'E') worst = std::max(worst, std::abs(a - r.rhs));
  }
  return worst;
}

// Strong-duality certificate: primal feasible, reduced-cost signs consistent
// with the variable's bound, and the dual objective matching the primal one.
void certify_optimal(const MilpInstance& inst, const LpResult& res) {
  REQUIRE(res.status == SolveStatus::Optimal);
  CHECK(primal_residual(inst, res.x) <= 1e-6);

  double dual_obj = inst.objective_offset;
  for (size_t r = 0; r < inst.rows.size(); ++r) dual_obj += res.duals[r] * inst.rows[r].rhs;
  // Logical reduced cost is -y_r; row sense gives its sign condition.
  for (size_t r = 0; r < inst.rows.size(); ++r) {
    const double d = -res.duals[r];
    if (inst.rows[r].sense == 'L') CHECK(d >= -1e-6);  // slack in [0, inf)
    if (inst.rows[r].sense == 'G') CHECK(d <= 1e-6);
  }
  for (size_t j = 0; j < inst.vars.size(); ++j) {
    const double d = res.reduced_costs[j];
    const auto& v = inst.vars[j];
    if (d > 1e-6) {
      REQUIRE(std::isfinite(v.lo));
      CHECK(res.x[j] <= v.lo + 1e-6);
      dual_obj += d * v.lo;
    } else if (d < -1e-6) {
      REQUIRE(std::isfinite(v.hi));
      CHECK(res.x[j] >= v.hi - 1e-6);
      dual_obj += d * v.hi;
    }
  }
  CHECK(std::abs(res.objective - dual_obj) <=
        1e-6 * std::max(1.0, std::abs(res.objective)));
}

}  // namespace

TEST_CASE("simplex on hand-built LPs") {
  SECTION("min x subject to x >= 3") {
    LpSpec s;
    int x = s.var("x", 0, kInf, 1.0);
    s.row('G', 3.0, {{x, 1.0}});
    auto res = solve_lp(s.inst);
    REQUIRE(res.status == SolveStatus::Optimal);
    CHECK(res.x[0] == Catch::Approx(3.0));
    CHECK(res.objective == Catch::Approx(3.0));
    certify_optimal(s.inst, res);
  }
  SECTION("degenerate equality-only system is feasible") {
    LpSpec s;
    int x = s.var("x", -kInf, kInf, 0.0);
    int y = s.var("y", -kInf, kInf, 0.0);
    s.row('E', 2.0, {{x, 1.0}, {y, 1.0}});
    s.row('E', 0.0, {{x, 1.0}, {y, -1.0}});
    auto res = solve_lp(s.inst);
    REQUIRE(res.status == SolveStatus::Optimal);
    CHECK(res.x[0] == Catch::Approx(1.0));
    CHECK(res.x[1] == Catch::Approx(1.0));
  }
  SECTION("conflicting bounds are infeasible") {
    LpSpec s;
    int x = s.var("x", 0, kInf, 1.0);
    s.row('G', 3.0, {{x, 1.0}});
    s.row('L', 1.0, {{x, 1.0}});
    CHECK(solve_lp(s.inst).status == SolveStatus::Infeasible);
  }
  SECTION("unbounded direction is detected") {
    LpSpec s;
    int x = s.var("x", 0, kInf, -1.0);
    s.row('G', 0.0, {{x, 1.0}});
    CHECK(solve_lp(s.inst).status == SolveStatus::Unbounded);
  }
  SECTION("free variables and negative costs") {
    LpSpec s;
    int x = s.var("x", -kInf, kInf, 1.0);
    int y = s.var("y", 0, 10, -2.0);
    s.row('G', -5.0, {{x, 1.0}});
    s.row('L', 8.0, {{x, 1.0}, {y, 1.0}});
    auto res = solve_lp(s.inst);
    REQUIRE(res.status == SolveStatus::Optimal);
    CHECK(res.objective == Catch::Approx(-5.0 - 2.0 * 10.0));
    certify_optimal(s.inst, res);
  }
}

TEST_CASE("random box LPs match vertex enumeration") {
  std::uint64_t state = 2024;
  int solved = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + static_cast<int>(oracle::u01(state) * 4.999);  // 2..6
    const int m = 1 + static_cast<int>(oracle::u01(state) * 4.999);  // 1..5
    oracle::BoxLp lp;
    lp.A.resize(m, n);
    lp.b.resize(m);
    lp.c.resize(n);
    lp.lo = Eigen::VectorXd::Zero(n);
    lp.hi = Eigen::VectorXd::Constant(n, 5.0);
    Eigen::VectorXd x0(n);
    for (int j = 0; j < n; ++j) {
      lp.c[j] = -5.0 + 10.0 * oracle::u01(state);
      x0[j] = 5.0 * oracle::u01(state);
    }
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) lp.A(i, j) = -2.0 + 4.0 * oracle::u01(state);
      lp.b[i] = lp.A.row(i).dot(x0) + 3.0 * oracle::u01(state);
    }

    auto want = oracle::vertex_enum_min(lp);
    REQUIRE(want.has_value());  // x0 is feasible by construction

    LpSpec s;
    for (int j = 0; j < n; ++j) s.var("x" + std::to_string(j), 0.0, 5.0, lp.c[j]);
    for (int i = 0; i < m; ++i) {
      std::vector<std::pair<int, double>> coeffs;
      for (int j = 0; j < n; ++j) coeffs.push_back({j, lp.A(i, j)});
      s.row('L', lp.b[i], std::move(coeffs));
    }
    auto res = solve_lp(s.inst);
    REQUIRE(res.status == SolveStatus::Optimal);
    CHECK(res.objective == Catch::Approx(*want).margin(1e-6));
    certify_optimal(s.inst, res);
    ++solved;
  }
  CHECK(solved == 60);
}

TEST_CASE("larger random LPs carry a strong-duality certificate") {
  std::uint64_t state = 77;
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 30, m = 20;
    LpSpec s;
    for (int j = 0; j < n; ++j)
      s.var("x" + std::to_string(j), 0.0, 4.0, -5.0 + 10.0 * oracle::u01(state));
    for (int i = 0; i < m; ++i) {
      std::vector<std::pair<int, double>> coeffs;
      double act = 0.0;
      for (int j = 0; j < n; ++j) {
        const double a = -2.0 + 4.0 * oracle::u01(state);
        coeffs.push_back({j, a});
        act += a * (4.0 * oracle::u01(state));
      }
      s.row(i % 3 == 0 ? 'G' : 'L', act + (i % 3 == 0 ? -40.0 : 2.0), std::move(coeffs));
    }
    auto res = solve_lp(s.inst);
    if (res.status != SolveStatus::Optimal) continue;  // rare random infeasible
    certify_optimal(s.inst, res);
  }
}

TEST_CASE("LP relaxation of the enum toy solves and satisfies every row") {
  SystemModel m = load_system(testutil::data_dir() / "toys/enum/system.json");
  auto scen = load_scenarios(testutil::data_dir() / "toys/enum/scenarios.json");
  MilpInstance inst = build_program(m, scen, {PlanMode::MultiObjective, {}});
  auto res = solve_lp(inst);
  REQUIRE(res.status == SolveStatus::Optimal);
  CHECK(primal_residual(inst, res.x) <= 1e-6);
  certify_optimal(inst, res);
}
