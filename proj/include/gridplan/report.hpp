#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "gridplan/builder.hpp"
#include "gridplan/costs.hpp"
#include "gridplan/milp.hpp"
#include "gridplan/replay.hpp"

namespace gridplan {

// Discounted operating cost of one epoch, recomputed from solution values:
// fixed O&M on installed capacity, weighted variable costs, imbalance
// penalties, demand-flexibility payments and policy non-compliance charges.
inline double operation_cost(const SolutionView& v, const ProgramData& data, int epoch) {
  const SystemModel& m = *data.model;
  const auto& cfg = m.config;
  const int y = epoch;

  double annual_fixed = 0.0;
  for (const auto& g : m.generators) {
    if (g.status != GenStatus::Existing) continue;
    if (!data.zone_online(data.zone_index(g.zone), y)) continue;
    annual_fixed += g.fixed_cost_per_mw_yr * g.p_max_mw;
  }
  for (size_t p = 0; p < data.new_pairs.size(); ++p) {
    const auto [zi, ti] = data.new_pairs[p];
    const TechnologyOption& tech = m.tech_options[ti];
    annual_fixed +=
        tech.fixed_om_per_mw_yr[y] * v(names::cap_avail(y, m.zones[zi].id, tech.id));
  }
  if (m.storage)
    for (int zi : data.storage_zones)
      annual_fixed += m.storage->fixed_om_per_mw_yr[y] *
                      v(names::st_power_avail(y, m.zones[zi].id));

  double annual_ops = 0.0;
  for (int d = 0; d < data.days(y); ++d) {
    const double w = data.weight(y, d) * cfg.delta_h;
    for (int h = 0; h < data.hours(); ++h) {
      for (const auto& g : m.generators)
        annual_ops += w * data.var_cost(g, y) * v(names::pg(y, g.id, d, h));
      for (size_t zi = 0; zi < m.zones.size(); ++zi) {
        const std::string& zid = m.zones[zi].id;
        annual_ops += w * cfg.pen_under * v(names::unserved(y, zid, d, h));
        annual_ops += w * cfg.pen_over * v(names::curtail(y, zid, d, h));
        for (const auto& b : m.demand_blocks)
          annual_ops += w * b.willingness_to_pay *
                        (v(names::flex_up(y, zid, b.id, d, h)) +
                         v(names::flex_down(y, zid, b.id, d, h)));
      }
    }
  }
  double annual_policy = 0.0;
  for (const auto& r : m.policy_regions)
    if (y >= r.target_epoch && r.enforcement == RpsEnforcement::Soft)
      annual_policy += r.penalty_per_mwh * v(names::rps_slack(y, r.id));

  return data.op_discount[y] * (annual_fixed + annual_ops + annual_policy);
}

// Discounted externality cost of one epoch (unweighted by omega): CO2 at the
// configured carbon price plus direct air-quality damage rates.
inline double externality_cost(const SolutionView& v, const ProgramData& data, int epoch) {
  const SystemModel& m = *data.model;
  const int y = epoch;
  double annual = 0.0;
  for (int d = 0; d < data.days(y); ++d) {
    const double w = data.weight(y, d) * m.config.delta_h;
    for (int h = 0; h < data.hours(); ++h)
      for (const auto& g : m.generators) {
        const double p = v(names::pg(y, g.id, d, h));
        if (p == 0.0) continue;
        if (g.externality_rates.empty())
          throw ModelError("dispatched generator " + g.id + " has no externality rates");
        annual += w * data.externality_rate(g) * p;
      }
  }
  return data.op_discount[y] * annual;
}

// Full cost breakdown of a solution, including undiscounted physical totals.
inline CostBreakdown evaluate_costs(const ProgramData& data, const MilpInstance& inst,
                                    const std::vector<double>& x) {
  const SystemModel& m = *data.model;
  const auto& cfg = m.config;
  SolutionView v(inst, x);
  CostBreakdown out;
  out.epochs = cfg.epochs;
  out.ic_generation.assign(cfg.epochs, 0.0);
  out.ic_transmission.assign(cfg.epochs, 0.0);
  out.ic_storage.assign(cfg.epochs, 0.0);
  out.oc.assign(cfg.epochs, 0.0);
  out.ec.assign(cfg.epochs, 0.0);

  for (size_t p = 0; p < data.new_pairs.size(); ++p) {
    const auto [zi, ti] = data.new_pairs[p];
    const TechnologyOption& tech = m.tech_options[ti];
    std::vector<double> builds(cfg.epochs, 0.0);
    for (int y = 0; y < cfg.epochs; ++y)
      builds[y] = v(names::cap_built(y, m.zones[zi].id, tech.id));
    auto ic = annualized_investment(builds, tech.capex_per_mw, tech.lifetime_years,
                                    cfg.discount_rate, data.es);
    for (int y = 0; y < cfg.epochs; ++y) out.ic_generation[y] += ic[y];
  }

  for (int li : data.active_lines) {
    const Line& l = m.lines[li];
    if (l.status != LineStatus::Candidate) continue;
    for (int ti : data.allowed[li]) {
      const LineType& t = m.line_types[ti];
      std::vector<double> builds(cfg.epochs, 0.0);
      bool any = false;
      for (int y = 0; y < cfg.epochs; ++y) {
        builds[y] = v(names::invest(y, l.id, t.id));
        any |= builds[y] != 0.0;
      }
      if (!any) continue;
      std::vector<double> cost(cfg.epochs, line_capital_cost(t, l.length_miles));
      auto ic = annualized_investment(builds, cost, cfg.line_lifetime_years,
                                      cfg.discount_rate, data.es);
      for (int y = 0; y < cfg.epochs; ++y) out.ic_transmission[y] += ic[y];
    }
  }

  if (m.storage) {
    const StorageSpec& st = *m.storage;
    for (int zi : data.storage_zones) {
      const std::string& zid = m.zones[zi].id;
      std::vector<double> pbuilds(cfg.epochs, 0.0), ebuilds(cfg.epochs, 0.0);
      for (int y = 0; y < cfg.epochs; ++y) {
        pbuilds[y] = v(names::st_power_built(y, zid));
        ebuilds[y] = v(names::st_energy_built(y, zid));
      }
      auto icp = annualized_investment(pbuilds, st.power_capex_per_mw, st.lifetime_years,
                                       cfg.discount_rate, data.es);
      auto ice = annualized_investment(ebuilds, st.energy_capex_per_mwh, st.lifetime_years,
                                       cfg.discount_rate, data.es);
      for (int y = 0; y < cfg.epochs; ++y) out.ic_storage[y] += icp[y] + ice[y];
    }
  }

  for (int y = 0; y < cfg.epochs; ++y) {
    out.oc[y] = operation_cost(v, data, y);
    out.ec[y] = externality_cost(v, data, y);
    for (int d = 0; d < data.days(y); ++d) {
      const double w = data.weight(y, d) * cfg.delta_h * cfg.years_per_epoch;
      for (int h = 0; h < data.hours(); ++h)
        for (const auto& g : m.generators) {
          const double p = v(names::pg(y, g.id, d, h));
          if (p == 0.0) continue;
          out.mwh_by_tech[g.tech] += w * p;
          auto co2 = g.externality_rates.find("co2");
          if (co2 != g.externality_rates.end()) out.co2_tons += w * p * co2->second;
          auto air = g.externality_rates.find("air_quality");
          if (air != g.externality_rates.end())
            out.air_quality_usd_by_zone[g.zone] += w * p * air->second;
        }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Plot-ready CSV tables

namespace detail {

inline std::ofstream open_table(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw Error("cannot write " + p.string());
  return out;
}

inline std::string money(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace detail

inline void write_cost_table(const CostBreakdown& cb, const std::filesystem::path& p) {
  auto out = detail::open_table(p);
  out << "epoch,ic_generation_usd,ic_transmission_usd,ic_storage_usd,oc_usd,ec_usd\n";
  for (int y = 0; y < cb.epochs; ++y)
    out << y + 1 << ',' << detail::money(cb.ic_generation[y]) << ','
        << detail::money(cb.ic_transmission[y]) << ',' << detail::money(cb.ic_storage[y])
        << ',' << detail::money(cb.oc[y]) << ',' << detail::money(cb.ec[y]) << "\n";
}

inline void write_topology_table(const ProgramData& data, const MilpInstance& inst,
                                 const std::vector<double>& x,
                                 const std::filesystem::path& p) {
  auto out = detail::open_table(p);
  SolutionView v(inst, x);
  const SystemModel& m = *data.model;
  out << "line,from,to,type,build_epoch\n";
  for (int li : data.active_lines) {
    const Line& l = m.lines[li];
    if (l.status != LineStatus::Candidate) continue;
    for (int ti : data.allowed[li])
      for (int y = 0; y < m.config.epochs; ++y)
        if (v(names::invest(y, l.id, m.line_types[ti].id)) > 0.5)
          out << l.id << ',' << l.from_zone << ',' << l.to_zone << ','
              << m.line_types[ti].id << ',' << y + 1 << "\n";
  }
}

inline void write_capacity_table(const ProgramData& data, const MilpInstance& inst,
                                 const std::vector<double>& x,
                                 const std::filesystem::path& p) {
  auto out = detail::open_table(p);
  SolutionView v(inst, x);
  const SystemModel& m = *data.model;
  out << "zone,tech,epoch,built_mw,available_mw\n";
  char buf[40];
  for (size_t pr = 0; pr < data.new_pairs.size(); ++pr) {
    const auto [zi, ti] = data.new_pairs[pr];
    const TechnologyOption& tech = m.tech_options[ti];
    for (int y = 0; y < m.config.epochs; ++y) {
      std::snprintf(buf, sizeof buf, "%.3f,%.3f",
                    v(names::cap_built(y, m.zones[zi].id, tech.id)),
                    v(names::cap_avail(y, m.zones[zi].id, tech.id)));
      out << m.zones[zi].id << ',' << tech.id << ',' << y + 1 << ',' << buf << "\n";
    }
  }
  if (m.storage)
    for (int zi : data.storage_zones)
      for (int y = 0; y < m.config.epochs; ++y) {
        std::snprintf(buf, sizeof buf, "%.3f,%.3f",
                      v(names::st_power_built(y, m.zones[zi].id)),
                      v(names::st_power_avail(y, m.zones[zi].id)));
        out << m.zones[zi].id << ",storage," << y + 1 << ',' << buf << "\n";
      }
}

inline void write_generation_table(const ProgramData& data, const MilpInstance& inst,
                                   const std::vector<double>& x,
                                   const std::filesystem::path& p) {
  auto out = detail::open_table(p);
  SolutionView v(inst, x);
  const SystemModel& m = *data.model;
  out << "tech,epoch,mwh\n";
  std::map<std::pair<std::string, int>, double> mwh;
  for (int y = 0; y < m.config.epochs; ++y)
    for (int d = 0; d < data.days(y); ++d) {
      const double w = data.weight(y, d) * m.config.delta_h * m.config.years_per_epoch;
      for (int h = 0; h < data.hours(); ++h)
        for (const auto& g : m.generators)
          mwh[{g.tech, y}] += w * v(names::pg(y, g.id, d, h));
    }
  for (const auto& [key, val] : mwh)
    out << key.first << ',' << key.second + 1 << ',' << detail::money(val) << "\n";
}

inline void write_emissions_table(const ProgramData& data, const MilpInstance& inst,
                                  const std::vector<double>& x,
                                  const std::filesystem::path& p) {
  auto out = detail::open_table(p);
  SolutionView v(inst, x);
  const SystemModel& m = *data.model;
  out << "zone,co2_mmt,air_quality_usd\n";
  std::map<std::string, double> co2, air;
  for (int y = 0; y < m.config.epochs; ++y)
    for (int d = 0; d < data.days(y); ++d) {
      const double w = data.weight(y, d) * m.config.delta_h * m.config.years_per_epoch;
      for (int h = 0; h < data.hours(); ++h)
        for (const auto& g : m.generators) {
          const double pg = v(names::pg(y, g.id, d, h));
          auto c = g.externality_rates.find("co2");
          if (c != g.externality_rates.end()) co2[g.zone] += w * pg * c->second;
          auto a = g.externality_rates.find("air_quality");
          if (a != g.externality_rates.end()) air[g.zone] += w * pg * a->second;
        }
    }
  char buf[64];
  double co2_total = 0, air_total = 0;
  for (const auto& z : m.zones) {
    const double ct = co2.count(z.id) ? co2[z.id] : 0.0;
    const double at = air.count(z.id) ? air[z.id] : 0.0;
    co2_total += ct;
    air_total += at;
    std::snprintf(buf, sizeof buf, "%s,%.6f,%.2f", z.id.c_str(), ct / 1e6, at);
    out << buf << "\n";
  }
  std::snprintf(buf, sizeof buf, "TOTAL,%.6f,%.2f", co2_total / 1e6, air_total);
  out << buf << "\n";
}

}  // namespace gridplan
