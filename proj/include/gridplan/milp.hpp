#pragma once

#include <cmath>
#include <cstdio>
#include <deque>
#include <string>
#include <unordered_map>
#include <vector>

#include "gridplan/common.hpp"

namespace gridplan {

enum class VarKind { Continuous, Binary };

struct Variable {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lo = 0.0;
  double hi = kInf;
};

// One linear row: sum(coeffs) sense rhs, sense in {'L','G','E'}.
struct Row {
  std::string name;
  std::string tag;  // constraint family
  char sense = 'L';
  double rhs = 0.0;
  std::vector<std::pair<int, double>> coeffs;
};

struct MilpInstance {
  std::string name;
  std::vector<Variable> vars;
  std::vector<double> objective;  // aligned with vars
  double objective_offset = 0.0;
  std::deque<Row> rows;  // deque: references stay valid while rows are added
  std::unordered_map<std::string, int> var_index;

  int add_var(const std::string& name, VarKind kind, double lo, double hi) {
    if (!var_index.emplace(name, static_cast<int>(vars.size())).second)
      throw ModelError("duplicate variable name " + name);
    vars.push_back({name, kind, lo, hi});
    objective.push_back(0.0);
    return static_cast<int>(vars.size()) - 1;
  }
  int find(const std::string& name) const {
    auto it = var_index.find(name);
    return it == var_index.end() ? -1 : it->second;
  }
  int require(const std::string& name) const {
    int i = find(name);
    if (i < 0) throw ModelError("unknown variable " + name);
    return i;
  }
  void add_objective(int var, double coef) { objective[var] += coef; }
  Row& add_row(std::string name, std::string tag, char sense, double rhs) {
    rows.push_back({std::move(name), std::move(tag), sense, rhs, {}});
    return rows.back();
  }

  int binary_count() const {
    int n = 0;
    for (const auto& v : vars) n += v.kind == VarKind::Binary;
    return n;
  }
  // Number of rows per constraint family.
  std::unordered_map<std::string, int> rows_by_tag() const {
    std::unordered_map<std::string, int> out;
    for (const auto& r : rows) ++out[r.tag];
    return out;
  }
  double eval_objective(const std::vector<double>& x) const {
    double s = objective_offset;
    for (size_t i = 0; i < objective.size(); ++i) s += objective[i] * x[i];
    return s;
  }
};

enum class SolveStatus { Optimal, GapFeasible, Infeasible, Unbounded, LimitHit };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::GapFeasible: return "gap-feasible";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::LimitHit: return "limit-hit";
  }
  return "?";
}

struct PlanSolution {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<double> values;  // by variable index
  double objective = std::nan("");
  double best_bound = std::nan("");
  double gap = std::nan("");
  long nodes = 0;
  long lp_iterations = 0;
  std::vector<double> bound_history;  // global bound at each node selection

  double value(const MilpInstance& inst, const std::string& name) const {
    int i = inst.find(name);
    return i < 0 ? 0.0 : values[i];
  }
};

// Structured variable tags. Everything that reads solutions back (replay,
// reports) goes through these builders, so the string layout is the contract.
namespace names {

inline std::string idx4(const char* sym, int y, const std::string& id, int d, int h) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s[y%d,%s,d%d,h%d]", sym, y + 1, id.c_str(), d, h);
  return buf;
}

// Generation and generator reserve.
inline std::string pg(int y, const std::string& gen, int d, int h) {
  return idx4("pg", y, gen, d, h);
}
inline std::string rg(int y, const std::string& gen, int d, int h) {
  return idx4("rg", y, gen, d, h);
}
// New capacity built / available per zone-technology pair.
inline std::string cap_built(int y, const std::string& zone, const std::string& tech) {
  return "Pg[y" + std::to_string(y + 1) + "," + zone + "," + tech + "]";
}
inline std::string cap_avail(int y, const std::string& zone, const std::string& tech) {
  return "Cg[y" + std::to_string(y + 1) + "," + zone + "," + tech + "]";
}
// Storage fleet per zone.
inline std::string st_power_built(int y, const std::string& zone) {
  return "Ps[y" + std::to_string(y + 1) + "," + zone + "]";
}
inline std::string st_energy_built(int y, const std::string& zone) {
  return "Es[y" + std::to_string(y + 1) + "," + zone + "]";
}
inline std::string st_power_avail(int y, const std::string& zone) {
  return "Pa[y" + std::to_string(y + 1) + "," + zone + "]";
}
inline std::string st_energy_avail(int y, const std::string& zone) {
  return "Ea[y" + std::to_string(y + 1) + "," + zone + "]";
}
inline std::string st_charge(int y, const std::string& zone, int d, int h) {
  return idx4("psc", y, zone, d, h);
}
inline std::string st_discharge(int y, const std::string& zone, int d, int h) {
  return idx4("psd", y, zone, d, h);
}
inline std::string st_reserve(int y, const std::string& zone, int d, int h) {
  return idx4("rs", y, zone, d, h);
}
// State of charge at hour boundary p = 0..H.
inline std::string soc(int y, const std::string& zone, int d, int p) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "soc[y%d,%s,d%d,p%d]", y + 1, zone.c_str(), d, p);
  return buf;
}
// Network.
inline std::string flow(int y, const std::string& line, int d, int h) {
  return idx4("f", y, line, d, h);
}
inline std::string angle(int y, const std::string& zone, int d, int h) {
  return idx4("th", y, zone, d, h);
}
// Balance slacks and demand flexibility.
inline std::string curtail(int y, const std::string& zone, int d, int h) {
  return idx4("cur", y, zone, d, h);
}
inline std::string unserved(int y, const std::string& zone, int d, int h) {
  return idx4("uns", y, zone, d, h);
}
inline std::string flex_up(int y, const std::string& zone, const std::string& blk, int d,
                           int h) {
  return idx4("ddp", y, zone + "," + blk, d, h);
}
inline std::string flex_down(int y, const std::string& zone, const std::string& blk, int d,
                             int h) {
  return idx4("ddm", y, zone + "," + blk, d, h);
}
// Policy shortfall.
inline std::string rps_slack(int y, const std::string& region) {
  return "rho[y" + std::to_string(y + 1) + "," + region + "]";
}
// Candidate line binaries.
inline std::string invest(int y, const std::string& line, const std::string& type) {
  return "inv[y" + std::to_string(y + 1) + "," + line + "," + type + "]";
}
inline std::string avail(int y, const std::string& line, const std::string& type) {
  return "avl[y" + std::to_string(y + 1) + "," + line + "," + type + "]";
}

}  // namespace names

}  // namespace gridplan
