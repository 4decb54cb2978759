#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "gridplan/common.hpp"
#include "gridplan/milp.hpp"
#include "gridplan/mps.hpp"

namespace gridplan {

// Plain-text solution file: '#' comments, optional "=status=" / "=bound="
// directives, then one "<variable> <value>" pair per line. A status of
// infeasible needs no variable lines.
inline void write_solution(const MilpInstance& inst, const PlanSolution& sol,
                           const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "# " << (inst.name.empty() ? "gridplan" : inst.name) << " solution\n";
  out << "=status= " << to_string(sol.status) << "\n";
  if (sol.status == SolveStatus::Infeasible) return;
  if (std::isfinite(sol.best_bound)) out << "=bound= " << detail::num17(sol.best_bound) << "\n";
  out << "=objective= " << detail::num17(sol.objective) << "\n";
  for (size_t j = 0; j < inst.vars.size(); ++j)
    if (sol.values[j] != 0.0 || inst.vars[j].kind == VarKind::Binary)
      out << inst.vars[j].name << " " << detail::num17(sol.values[j]) << "\n";
}

// Parses a solution file against the instance. Missing continuous variables
// default to zero (solvers omit zeros); a missing binary is a malformed file.
inline PlanSolution read_solution(const MilpInstance& inst,
                                  const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open solution file " + path.string());
  PlanSolution sol;
  sol.values.assign(inst.vars.size(), 0.0);
  std::vector<bool> seen(inst.vars.size(), false);
  std::string status = "gap-feasible";
  std::optional<double> bound;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream is(line);
    std::string key;
    is >> key;
    if (key == "=status=") {
      is >> status;
      continue;
    }
    if (key == "=bound=") {
      double b;
      if (is >> b) bound = b;
      continue;
    }
    if (key == "=objective=") continue;  // recomputed below
    if (key == "infeasible" || key == "INFEASIBLE") {
      status = "infeasible";
      continue;
    }
    double v;
    if (!(is >> v))
      throw ParseError(path.string() + ":" + std::to_string(lineno) +
                       ": expected '<variable> <value>'");
    const int j = inst.find(key);
    if (j < 0)
      throw ParseError(path.string() + ":" + std::to_string(lineno) +
                       ": unknown variable " + key);
    sol.values[j] = v;
    seen[j] = true;
  }

  if (status == "infeasible") {
    sol.status = SolveStatus::Infeasible;
    return sol;
  }
  for (size_t j = 0; j < inst.vars.size(); ++j) {
    if (inst.vars[j].kind != VarKind::Binary) continue;
    if (!seen[j])
      throw ParseError(path.string() + ": malformed solution: missing binary " +
                       inst.vars[j].name);
    if (std::abs(sol.values[j] - std::round(sol.values[j])) > kIntTol)
      throw ParseError(path.string() + ": malformed solution: binary " +
                       inst.vars[j].name + " is fractional");
  }
  sol.objective = inst.eval_objective(sol.values);
  if (status == "optimal") {
    sol.status = SolveStatus::Optimal;
    sol.best_bound = bound.value_or(sol.objective);
  } else {
    sol.status = SolveStatus::GapFeasible;
    sol.best_bound = bound.value_or(-kInf);
  }
  sol.gap = (sol.objective - sol.best_bound) / std::max(1.0, std::abs(sol.objective));
  if (sol.gap < 0) sol.gap = 0;
  return sol;
}

// Hands the instance to an external MILP solver over the MPS + solution-file
// contract: `<command> <model.mps> <solution.txt> <gap>`. The returned values
// must replay cleanly; the objective is recomputed from the instance.
inline PlanSolution backend_solve(const MilpInstance& inst, const std::string& command,
                                  const std::filesystem::path& workdir, double gap) {
  if (command.empty()) throw SolverError("no backend solver configured");
  std::filesystem::create_directories(workdir);
  const auto mps = workdir / "model.mps";
  const auto solfile = workdir / "solution.txt";
  write_mps(inst, mps);
  std::error_code ec;
  std::filesystem::remove(solfile, ec);

  char gapbuf[32];
  std::snprintf(gapbuf, sizeof gapbuf, "%.12g", gap);
  const std::string cmd =
      command + " \"" + mps.string() + "\" \"" + solfile.string() + "\" " + gapbuf;
  const int rc = std::system(cmd.c_str());
  if (rc != 0)
    throw SolverError("backend command failed (exit " + std::to_string(rc) +
                      "): " + cmd);
  if (!std::filesystem::exists(solfile))
    throw SolverError("backend produced no solution file: " + solfile.string());
  return read_solution(inst, solfile);
}

}  // namespace gridplan
