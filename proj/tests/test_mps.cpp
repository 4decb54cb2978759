#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include "gridplan/backend.hpp"
#include "gridplan/builder.hpp"
#include "gridplan/mps.hpp"
#include "gridplan/system_io.hpp"
#include "helpers.hpp"

using namespace gridplan;

namespace {

MilpInstance toy_instance(PlanMode mode = PlanMode::MultiObjective) {
  SystemModel m = load_system(testutil::data_dir() / "toys/enum/system.json");
  auto scen = load_scenarios(testutil::data_dir() / "toys/enum/scenarios.json");
  return build_program(m, scen, {mode, {}});
}

}  // namespace

TEST_CASE("empty instance writes a header-only MPS that reads back") {
  auto dir = testutil::scratch_dir("mps0");
  MilpInstance empty;
  empty.name = "empty";
  write_mps(empty, dir / "e.mps");
  MilpInstance back = read_mps(dir / "e.mps");
  CHECK(back.vars.empty());
  CHECK(back.rows.empty());
  std::string why;
  CHECK(structurally_equal(empty, back, &why));
}

TEST_CASE("toy program round-trips through MPS structurally") {
  auto dir = testutil::scratch_dir("mps1");
  MilpInstance inst = toy_instance();
  write_mps(inst, dir / "toy.mps");
  MilpInstance back = read_mps(dir / "toy.mps");
  std::string why;
  const bool same = structurally_equal(inst, back, &why);
  INFO(why);
  CHECK(same);

  SECTION("binary markers cover every investment and availability variable") {
    for (size_t j = 0; j < back.vars.size(); ++j) {
      const auto& name = back.vars[j].name;
      if (name.rfind("inv[", 0) == 0 || name.rfind("avl[", 0) == 0)
        CHECK(back.vars[j].kind == VarKind::Binary);
      else
        CHECK(back.vars[j].kind == VarKind::Continuous);
    }
  }
  SECTION("objective offset survives") {
    CHECK(back.objective_offset == inst.objective_offset);
    CHECK(inst.objective_offset > 0.0);  // existing fleet fixed O&M
  }
}

TEST_CASE("solution files round-trip and validate binaries") {
  auto dir = testutil::scratch_dir("solf");
  MilpInstance inst = toy_instance();
  PlanSolution sol;
  sol.status = SolveStatus::Optimal;
  sol.values.assign(inst.vars.size(), 0.0);
  // Mark one candidate as built so some binaries are 1.
  sol.values[inst.require(names::invest(0, "C1", "ac-150"))] = 1.0;
  sol.values[inst.require(names::avail(0, "C1", "ac-150"))] = 1.0;
  sol.values[inst.require(names::avail(1, "C1", "ac-150"))] = 1.0;
  sol.values[inst.require(names::pg(0, "G1", 0, 0))] = 123.456;
  sol.objective = inst.eval_objective(sol.values);
  sol.best_bound = sol.objective;
  sol.gap = 0.0;

  write_solution(inst, sol, dir / "s.txt");
  PlanSolution back = read_solution(inst, dir / "s.txt");
  CHECK(back.status == SolveStatus::Optimal);
  CHECK(back.values == sol.values);
  CHECK(back.objective == Catch::Approx(sol.objective));

  SECTION("missing binary is a malformed solution") {
    std::ofstream out(dir / "bad.txt");
    out << "pg[y1,G1,d0,h0] 12\n";  // no binaries at all
    out.close();
    CHECK_THROWS_WITH(read_solution(inst, dir / "bad.txt"),
                      Catch::Matchers::ContainsSubstring("missing binary"));
  }
  SECTION("fractional binary is a malformed solution") {
    write_solution(inst, sol, dir / "frac.txt");
    std::ofstream out(dir / "frac.txt", std::ios::app);
    out << names::invest(1, "C2", "dc-150") << " 0.37\n";
    out.close();
    CHECK_THROWS_WITH(read_solution(inst, dir / "frac.txt"),
                      Catch::Matchers::ContainsSubstring("fractional"));
  }
  SECTION("infeasible marker") {
    std::ofstream out(dir / "inf.txt");
    out << "=status= infeasible\n";
    out.close();
    CHECK(read_solution(inst, dir / "inf.txt").status == SolveStatus::Infeasible);
  }
}

TEST_CASE("unknown variables and broken sections are parse errors") {
  auto dir = testutil::scratch_dir("mpsbad");
  MilpInstance inst = toy_instance();
  SECTION("solution with unknown variable") {
    std::ofstream out(dir / "u.txt");
    out << "nosuchvar 1\n";
    out.close();
    CHECK_THROWS_AS(read_solution(inst, dir / "u.txt"), ParseError);
  }
  SECTION("mps without ENDATA") {
    std::ofstream out(dir / "trunc.mps");
    out << "NAME x\nROWS\n N  OBJ\n";
    out.close();
    CHECK_THROWS_AS(read_mps(dir / "trunc.mps"), ParseError);
  }
}
