#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gridplan/common.hpp"
#include "gridplan/milp.hpp"

namespace gridplan {

namespace detail {

inline std::string num17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string pad(const std::string& s, size_t w) {
  if (s.size() >= w) return s + " ";
  return s + std::string(w - s.size() + 1, ' ');
}

}  // namespace detail

// Writes the instance in MPS format: deterministic row/column order (the
// instance order), INTORG/INTEND markers around binary columns, explicit
// bounds, objective constant carried on the RHS of the objective row.
inline void write_mps(const MilpInstance& inst, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());

  size_t w = 9;
  for (const auto& v : inst.vars) w = std::max(w, v.name.size());
  for (const auto& r : inst.rows) w = std::max(w, r.name.size());

  out << "* rows: " << inst.rows.size() << " columns: " << inst.vars.size()
      << " binaries: " << inst.binary_count() << "\n";
  out << "NAME " << (inst.name.empty() ? "gridplan" : inst.name) << "\n";
  out << "ROWS\n";
  out << " N  OBJ\n";
  for (const auto& r : inst.rows) out << " " << r.sense << "  " << r.name << "\n";

  // Column-major coefficients, preserving row order inside each column.
  std::vector<std::vector<std::pair<int, double>>> cols(inst.vars.size());
  for (size_t ri = 0; ri < inst.rows.size(); ++ri) {
    std::map<int, double> merged;
    for (const auto& [j, a] : inst.rows[ri].coeffs) merged[j] += a;
    for (const auto& [j, a] : merged)
      if (a != 0.0) cols[j].push_back({static_cast<int>(ri), a});
  }

  out << "COLUMNS\n";
  bool in_int = false;
  int marker = 0;
  for (size_t j = 0; j < inst.vars.size(); ++j) {
    const auto& v = inst.vars[j];
    const bool want_int = v.kind == VarKind::Binary;
    if (want_int != in_int) {
      char mbuf[64];
      std::snprintf(mbuf, sizeof mbuf, "    MARKER%04d  'MARKER'                 '%s'\n",
                    marker++, want_int ? "INTORG" : "INTEND");
      out << mbuf;
      in_int = want_int;
    }
    if (inst.objective[j] != 0.0 || cols[j].empty())
      out << "    " << detail::pad(v.name, w) << detail::pad("OBJ", w)
          << detail::num17(inst.objective[j]) << "\n";
    for (const auto& [ri, a] : cols[j])
      out << "    " << detail::pad(v.name, w) << detail::pad(inst.rows[ri].name, w)
          << detail::num17(a) << "\n";
  }
  if (in_int) {
    char mbuf[64];
    std::snprintf(mbuf, sizeof mbuf,
                  "    MARKER%04d  'MARKER'                 'INTEND'\n", marker++);
    out << mbuf;
  }

  out << "RHS\n";
  if (inst.objective_offset != 0.0)
    out << "    " << detail::pad("B", w) << detail::pad("OBJ", w)
        << detail::num17(-inst.objective_offset) << "\n";
  for (const auto& r : inst.rows)
    if (r.rhs != 0.0)
      out << "    " << detail::pad("B", w) << detail::pad(r.name, w)
          << detail::num17(r.rhs) << "\n";

  out << "BOUNDS\n";
  for (const auto& v : inst.vars) {
    if (v.kind == VarKind::Binary && v.lo == 0.0 && v.hi == 1.0) {
      out << " BV " << detail::pad("BND", w) << v.name << "\n";
      continue;
    }
    if (v.lo == v.hi) {
      out << " FX " << detail::pad("BND", w) << detail::pad(v.name, w)
          << detail::num17(v.lo) << "\n";
      continue;
    }
    const bool lo_inf = !std::isfinite(v.lo), hi_inf = !std::isfinite(v.hi);
    if (lo_inf && hi_inf) {
      out << " FR " << detail::pad("BND", w) << v.name << "\n";
      continue;
    }
    if (lo_inf)
      out << " MI " << detail::pad("BND", w) << v.name << "\n";
    else if (v.lo != 0.0)
      out << " LO " << detail::pad("BND", w) << detail::pad(v.name, w)
          << detail::num17(v.lo) << "\n";
    if (!hi_inf)
      out << " UP " << detail::pad("BND", w) << detail::pad(v.name, w)
          << detail::num17(v.hi) << "\n";
  }
  out << "ENDATA\n";
}

// Reads back an MPS file written by write_mps (plus the common fixed-format
// variations: token-based fields, N/L/G/E rows, markers, RHS, RANGES-free).
inline MilpInstance read_mps(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open MPS file " + path.string());

  MilpInstance inst;
  std::map<std::string, int> row_of;
  std::string obj_row;
  enum Section { None, Rows, Columns, Rhs, Ranges, Bounds, Done } sec = None;
  bool in_int = false;
  std::string line;
  int lineno = 0;

  auto tokens = [](const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    std::string t;
    while (is >> t) out.push_back(t);
    return out;
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '*') continue;
    const bool header = !std::isspace(static_cast<unsigned char>(line[0]));
    auto tk = tokens(line);
    if (tk.empty()) continue;
    if (header) {
      const std::string& h = tk[0];
      if (h == "NAME") {
        inst.name = tk.size() > 1 ? tk[1] : "";
      } else if (h == "ROWS") {
        sec = Rows;
      } else if (h == "COLUMNS") {
        sec = Columns;
      } else if (h == "RHS") {
        sec = Rhs;
      } else if (h == "RANGES") {
        sec = Ranges;
      } else if (h == "BOUNDS") {
        sec = Bounds;
      } else if (h == "ENDATA") {
        sec = Done;
        break;
      } else {
        throw ParseError(path.string() + ":" + std::to_string(lineno) +
                         ": unknown section " + h);
      }
      continue;
    }
    switch (sec) {
      case Rows: {
        if (tk.size() != 2)
          throw ParseError(path.string() + ":" + std::to_string(lineno) + ": bad row line");
        if (tk[0] == "N") {
          if (obj_row.empty()) obj_row = tk[1];
        } else if (tk[0] == "L" || tk[0] == "G" || tk[0] == "E") {
          row_of[tk[1]] = static_cast<int>(inst.rows.size());
          inst.add_row(tk[1], "mps", tk[0][0], 0.0);
        } else {
          throw ParseError(path.string() + ":" + std::to_string(lineno) +
                           ": bad row sense " + tk[0]);
        }
        break;
      }
      case Columns: {
        if (tk.size() >= 3 && tk[1] == "'MARKER'") {
          if (tk[2] == "'INTORG'") in_int = true;
          else if (tk[2] == "'INTEND'") in_int = false;
          break;
        }
        if (tk.size() < 3 || tk.size() % 2 == 0)
          throw ParseError(path.string() + ":" + std::to_string(lineno) +
                           ": bad column line");
        int j = inst.find(tk[0]);
        if (j < 0)
          j = inst.add_var(tk[0], in_int ? VarKind::Binary : VarKind::Continuous, 0.0,
                           in_int ? 1.0 : kInf);
        for (size_t t = 1; t + 1 < tk.size(); t += 2) {
          const double a = std::stod(tk[t + 1]);
          if (tk[t] == obj_row) {
            inst.add_objective(j, a);
          } else {
            auto it = row_of.find(tk[t]);
            if (it == row_of.end())
              throw ParseError(path.string() + ":" + std::to_string(lineno) +
                               ": unknown row " + tk[t]);
            inst.rows[it->second].coeffs.push_back({j, a});
          }
        }
        break;
      }
      case Rhs: {
        if (tk.size() < 3)
          throw ParseError(path.string() + ":" + std::to_string(lineno) + ": bad rhs line");
        for (size_t t = 1; t + 1 < tk.size(); t += 2) {
          const double b = std::stod(tk[t + 1]);
          if (tk[t] == obj_row) {
            inst.objective_offset = -b;
          } else {
            auto it = row_of.find(tk[t]);
            if (it == row_of.end())
              throw ParseError(path.string() + ":" + std::to_string(lineno) +
                               ": unknown row " + tk[t]);
            inst.rows[it->second].rhs = b;
          }
        }
        break;
      }
      case Ranges:
        throw ParseError(path.string() + ": RANGES are not produced or consumed here");
      case Bounds: {
        if (tk.size() < 3)
          throw ParseError(path.string() + ":" + std::to_string(lineno) +
                           ": bad bound line");
        const std::string& kind = tk[0];
        const std::string& vname = tk[2];
        const int j = inst.find(vname);
        if (j < 0)
          throw ParseError(path.string() + ":" + std::to_string(lineno) +
                           ": bound on unknown column " + vname);
        auto& v = inst.vars[j];
        const double val = tk.size() > 3 ? std::stod(tk[3]) : 0.0;
        if (kind == "UP") v.hi = val;
        else if (kind == "LO") v.lo = val;
        else if (kind == "FX") v.lo = v.hi = val;
        else if (kind == "FR") { v.lo = -kInf; v.hi = kInf; }
        else if (kind == "MI") v.lo = -kInf;
        else if (kind == "PL") v.hi = kInf;
        else if (kind == "BV") { v.kind = VarKind::Binary; v.lo = 0.0; v.hi = 1.0; }
        else
          throw ParseError(path.string() + ":" + std::to_string(lineno) +
                           ": unsupported bound type " + kind);
        break;
      }
      case None:
      case Done:
        break;
    }
  }
  if (sec != Done) throw ParseError(path.string() + ": missing ENDATA");
  return inst;
}

// Structural equality: names, kinds, bounds, objective, senses, rhs and
// coefficient lists (order-insensitive within a row).
inline bool structurally_equal(const MilpInstance& a, const MilpInstance& b,
                               std::string* why = nullptr) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (a.vars.size() != b.vars.size()) return fail("column count differs");
  if (a.rows.size() != b.rows.size()) return fail("row count differs");
  if (a.objective_offset != b.objective_offset) return fail("objective offset differs");
  for (size_t j = 0; j < a.vars.size(); ++j) {
    if (a.vars[j].name != b.vars[j].name) return fail("column name " + a.vars[j].name);
    if (a.vars[j].kind != b.vars[j].kind) return fail("column kind " + a.vars[j].name);
    if (a.vars[j].lo != b.vars[j].lo || a.vars[j].hi != b.vars[j].hi)
      return fail("bounds of " + a.vars[j].name);
    if (a.objective[j] != b.objective[j]) return fail("objective of " + a.vars[j].name);
  }
  for (size_t r = 0; r < a.rows.size(); ++r) {
    const Row& x = a.rows[r];
    const Row& y = b.rows[r];
    if (x.name != y.name || x.sense != y.sense || x.rhs != y.rhs)
      return fail("row " + x.name);
    std::map<int, double> cx, cy;
    for (const auto& [j, v] : x.coeffs) cx[j] += v;
    for (const auto& [j, v] : y.coeffs) cy[j] += v;
    for (auto it = cx.begin(); it != cx.end();)
      it = it->second == 0.0 ? cx.erase(it) : std::next(it);
    for (auto it = cy.begin(); it != cy.end();)
      it = it->second == 0.0 ? cy.erase(it) : std::next(it);
    if (cx != cy) return fail("coefficients of row " + x.name);
  }
  return true;
}

}  // namespace gridplan
