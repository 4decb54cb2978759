#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "gridplan/builder.hpp"
#include "gridplan/milp.hpp"

namespace gridplan {

// Replays a solution against the model semantics directly (dispatch balances,
// state-of-charge bookkeeping, line limits, flexibility neutrality, reserve
// and policy coverage), independent of how the rows were assembled.
struct ReplayReport {
  double balance = 0.0;            // max nodal imbalance, MW
  double soc = 0.0;                // max SoC recursion/boundary/window breach, MWh
  double flow = 0.0;               // max flow-limit or flow-definition breach
  double flex = 0.0;               // max daily neutrality / band breach
  double reserve = 0.0;            // max reserve shortfall
  double generator = 0.0;          // max generator limit / coupling breach
  double rps = 0.0;                // max unexplained policy shortfall, MWh
  double line_logic = 0.0;         // availability bookkeeping / export breach
  std::vector<std::string> problems;

  double worst() const {
    return std::max({balance, soc, flow, flex, reserve, generator, rps, line_logic});
  }
  bool ok(double tol = kCheckTol) const { return worst() <= tol; }
};

class SolutionView {
 public:
  SolutionView(const MilpInstance& inst, const std::vector<double>& x)
      : inst_(&inst), x_(&x) {}
  double operator()(const std::string& name) const {
    const int j = inst_->find(name);
    return j < 0 ? 0.0 : (*x_)[j];
  }
  bool has(const std::string& name) const { return inst_->find(name) >= 0; }

 private:
  const MilpInstance* inst_;
  const std::vector<double>* x_;
};

inline ReplayReport replay_check(const SystemModel& m, const ScenarioSet& scen,
                                 const BuildOptions& opt, const MilpInstance& inst,
                                 const std::vector<double>& x) {
  ProgramData data(m, scen, opt);
  SolutionView v(inst, x);
  ReplayReport rep;
  const auto& cfg = m.config;
  const int H = data.hours();

  auto note = [&rep](double& slot, double breach, const std::string& what) {
    if (breach > slot) slot = breach;
    if (breach > kCheckTol) rep.problems.push_back(what);
  };

  for (int y = 0; y < cfg.epochs; ++y) {
    // Cumulative new capacity per pair, from the build variables.
    std::map<std::string, double> avail_cap;
    for (size_t p = 0; p < data.new_pairs.size(); ++p) {
      const auto [zi, ti] = data.new_pairs[p];
      const TechnologyOption& tech = m.tech_options[ti];
      double c = 0.0;
      for (int n = 0; n <= y; ++n)
        if (data.alive(n, y, tech.lifetime_years))
          c += v(names::cap_built(n, m.zones[zi].id, tech.id));
      avail_cap[m.generators[data.new_pair_gen[p]].id] = c;
    }

    for (int d = 0; d < data.days(y); ++d) {
      for (int h = 0; h < H; ++h) {
        // Nodal balance.
        for (size_t zi = 0; zi < m.zones.size(); ++zi) {
          const std::string& zid = m.zones[zi].id;
          double lhs = 0.0;
          for (const auto& g : m.generators)
            if (g.zone == zid) lhs += v(names::pg(y, g.id, d, h));
          for (int li : data.active_lines) {
            const Line& l = m.lines[li];
            if (l.from_zone == zid) lhs -= v(names::flow(y, l.id, d, h));
            if (l.to_zone == zid) lhs += v(names::flow(y, l.id, d, h));
          }
          double dd = 0.0;
          for (const auto& b : m.demand_blocks)
            dd += v(names::flex_up(y, zid, b.id, d, h)) -
                  v(names::flex_down(y, zid, b.id, d, h));
          double rhs = data.demand(y, static_cast<int>(zi), d, h) + dd +
                       v(names::curtail(y, zid, d, h)) - v(names::unserved(y, zid, d, h));
          if (m.storage &&
              std::count(data.storage_zones.begin(), data.storage_zones.end(),
                         static_cast<int>(zi)))
            rhs += v(names::st_charge(y, zid, d, h)) - v(names::st_discharge(y, zid, d, h));
          note(rep.balance, std::abs(lhs - rhs),
               "balance at " + zid + " y" + std::to_string(y + 1));

          // Slack limits.
          note(rep.balance,
               v(names::unserved(y, zid, d, h)) -
                   (data.demand(y, static_cast<int>(zi), d, h) + dd),
               "unserved beyond demand at " + zid);
          double intermittent = 0.0;
          for (const auto& g : m.generators)
            if (g.zone == zid && !g.dispatchable) intermittent += v(names::pg(y, g.id, d, h));
          note(rep.balance,
               v(names::curtail(y, zid, d, h)) - cfg.curtail_fraction * intermittent,
               "curtailment beyond cap at " + zid);
        }

        // Reserve coverage.
        if (cfg.reserve.per_zone) {
          for (size_t zi = 0; zi < m.zones.size(); ++zi) {
            double have = 0.0, load = data.demand(y, static_cast<int>(zi), d, h),
                   wind = 0.0;
            for (const auto& g : m.generators) {
              if (g.zone != m.zones[zi].id) continue;
              if (g.dispatchable) have += v(names::rg(y, g.id, d, h));
              else wind += v(names::pg(y, g.id, d, h));
            }
            have += v(names::st_reserve(y, m.zones[zi].id, d, h));
            note(rep.reserve,
                 cfg.reserve.load_fraction * load +
                     cfg.reserve.intermittent_fraction * wind - have,
                 "reserve shortfall");
          }
        } else {
          double have = 0.0, load = 0.0, wind = 0.0;
          for (size_t zi = 0; zi < m.zones.size(); ++zi)
            load += data.demand(y, static_cast<int>(zi), d, h);
          for (const auto& g : m.generators) {
            if (g.dispatchable) have += v(names::rg(y, g.id, d, h));
            else wind += v(names::pg(y, g.id, d, h));
          }
          for (int zi : data.storage_zones)
            have += v(names::st_reserve(y, m.zones[zi].id, d, h));
          note(rep.reserve,
               cfg.reserve.load_fraction * load +
                   cfg.reserve.intermittent_fraction * wind - have,
               "reserve shortfall y" + std::to_string(y + 1));
        }

        // Generator limits, ramps, couplings.
        for (const auto& g : m.generators) {
          const int zi = data.zone_index(g.zone);
          const double pg = v(names::pg(y, g.id, d, h));
          if (!data.zone_online(zi, y)) {
            note(rep.generator, std::abs(pg), "offline generator dispatched: " + g.id);
            continue;
          }
          if (g.status == GenStatus::Existing) {
            if (g.dispatchable) {
              note(rep.generator, g.p_min_mw - pg, "below p_min: " + g.id);
              note(rep.generator, pg - g.p_max_mw, "above p_max: " + g.id);
            } else {
              note(rep.generator,
                   std::abs(pg - g.p_max_mw * data.cf(g, y, d, h)),
                   "profile mismatch: " + g.id);
            }
          } else {
            if (g.dispatchable) {
              note(rep.generator, pg - avail_cap[g.id], "dispatch beyond built: " + g.id);
            } else {
              note(rep.generator, std::abs(pg - avail_cap[g.id] * data.cf(g, y, d, h)),
                   "profile mismatch (new): " + g.id);
            }
          }
          if (g.dispatchable) {
            const double rg = v(names::rg(y, g.id, d, h));
            note(rep.generator, rg - g.ramp_mw_per_hour * cfg.delta_h_reserve,
                 "reserve beyond ramp window: " + g.id);
            if (h >= 1) {
              const double prev = v(names::pg(y, g.id, d, h - 1));
              const double rprev = v(names::rg(y, g.id, d, h - 1));
              note(rep.generator, pg + rg - prev - g.ramp_mw_per_hour,
                   "ramp up breach: " + g.id);
              note(rep.generator, -(pg - prev - rprev) - g.ramp_mw_per_hour,
                   "ramp down breach: " + g.id);
            }
          }
        }
      }

      // Demand-flexibility bands and daily neutrality per zone.
      for (size_t zi = 0; zi < m.zones.size(); ++zi) {
        const std::string& zid = m.zones[zi].id;
        double day_sum = 0.0;
        for (int h = 0; h < H; ++h) {
          for (const auto& b : m.demand_blocks) {
            const double up = v(names::flex_up(y, zid, b.id, d, h));
            const double dn = v(names::flex_down(y, zid, b.id, d, h));
            day_sum += up - dn;
            note(rep.flex,
                 up + dn - b.share * cfg.flex_fraction *
                               data.demand(y, static_cast<int>(zi), d, h),
                 "flex band breach at " + zid);
          }
        }
        note(rep.flex, std::abs(day_sum), "flex day not neutral at " + zid);
      }

      // Storage bookkeeping.
      if (m.storage) {
        const StorageSpec& st = *m.storage;
        for (int zi : data.storage_zones) {
          const std::string& zid = m.zones[zi].id;
          double e_avail = 0.0, p_avail = 0.0;
          for (int n = 0; n <= y; ++n)
            if (data.alive(n, y, st.lifetime_years)) {
              e_avail += data.storage_decay(n, y) * v(names::st_energy_built(n, zid));
              p_avail += v(names::st_power_built(n, zid));
            }
          note(rep.soc, std::abs(v(names::soc(y, zid, d, 0)) - st.soc_init * e_avail),
               "soc start boundary at " + zid);
          note(rep.soc, std::abs(v(names::soc(y, zid, d, H)) - st.soc_init * e_avail),
               "soc end boundary at " + zid);
          for (int h = 0; h < H; ++h) {
            const double ch = v(names::st_charge(y, zid, d, h));
            const double dis = v(names::st_discharge(y, zid, d, h));
            const double rs = v(names::st_reserve(y, zid, d, h));
            const double before = v(names::soc(y, zid, d, h));
            const double after = v(names::soc(y, zid, d, h + 1));
            note(rep.soc,
                 std::abs(after - before - st.eta_charge * cfg.delta_h * ch +
                          cfg.delta_h / st.eta_discharge * dis),
                 "soc recursion at " + zid);
            note(rep.soc, ch - p_avail, "charge beyond power at " + zid);
            note(rep.soc, dis - p_avail, "discharge beyond power at " + zid);
            note(rep.soc, rs + dis - ch - p_avail, "reserve beyond power at " + zid);
            note(rep.soc,
                 (rs - ch) * cfg.delta_h_reserve * cfg.delta_h -
                     st.eta_discharge * (after - st.dod * e_avail),
                 "reserve beyond energy at " + zid);
          }
          for (int p2 = 0; p2 <= H; ++p2) {
            const double s = v(names::soc(y, zid, d, p2));
            note(rep.soc, s - e_avail, "soc above capacity at " + zid);
            note(rep.soc, st.dod * e_avail - s, "soc below floor at " + zid);
          }
          note(rep.soc,
               std::abs(st.duration_hours * v(names::st_power_built(y, zid)) -
                        v(names::st_energy_built(y, zid))),
               "duration sizing at " + zid);
        }
      }

      // Flow limits and candidate gating.
      for (int li : data.active_lines) {
        const Line& l = m.lines[li];
        for (int h = 0; h < H; ++h) {
          const double f = v(names::flow(y, l.id, d, h));
          if (l.status == LineStatus::Existing) {
            note(rep.flow, std::abs(f) - l.existing_capacity_mw,
                 "flow beyond capacity: " + l.id);
            if (l.current == CurrentKind::AC) {
              const double df = *l.susceptance *
                                (v(names::angle(y, l.from_zone, d, h)) -
                                 v(names::angle(y, l.to_zone, d, h)));
              note(rep.flow, std::abs(f - df), "flow/angle mismatch: " + l.id);
            }
          } else {
            double cap = 0.0;
            for (int ti : data.allowed[li]) {
              const std::string& tid = m.line_types[ti].id;
              const double z = v(names::avail(y, l.id, tid));
              cap += m.line_types[ti].capacity_mw * z;
              if (l.current == CurrentKind::AC && z > 0.5) {
                const double df = *l.susceptance *
                                  (v(names::angle(y, l.from_zone, d, h)) -
                                   v(names::angle(y, l.to_zone, d, h)));
                note(rep.flow, std::abs(f - df), "built flow/angle mismatch: " + l.id);
              }
            }
            note(rep.flow, std::abs(f) - cap, "candidate flow beyond built: " + l.id);
          }
        }
      }
    }

    // Availability bookkeeping, single-investment rule, offshore export.
    for (int li : data.active_lines) {
      const Line& l = m.lines[li];
      if (l.status != LineStatus::Candidate) continue;
      double invested = 0.0;
      for (int ti : data.allowed[li]) {
        const std::string& tid = m.line_types[ti].id;
        double cum = 0.0;
        for (int n = 0; n + cfg.build_delay <= y; ++n) cum += v(names::invest(n, l.id, tid));
        note(rep.line_logic, std::abs(v(names::avail(y, l.id, tid)) - cum),
             "availability bookkeeping: " + l.id);
      }
      for (int ti : data.allowed[li])
        for (int n = 0; n < cfg.epochs; ++n)
          invested += v(names::invest(n, l.id, m.line_types[ti].id));
      note(rep.line_logic, invested - 1.0, "line invested twice: " + l.id);
    }
    for (size_t zi = 0; zi < m.zones.size(); ++zi) {
      const Zone& z = m.zones[zi];
      if (z.kind != ZoneKind::Offshore || y < data.online_epoch[zi]) continue;
      double have = 0.0;
      for (int li : data.active_lines) {
        const Line& l = m.lines[li];
        if (l.status != LineStatus::Candidate) continue;
        if (l.from_zone != z.id && l.to_zone != z.id) continue;
        for (int ti : data.allowed[li]) have += v(names::avail(y, l.id, m.line_types[ti].id));
      }
      note(rep.line_logic, 1.0 - have, "offshore zone unexported: " + z.id);
    }

    // Policy coverage: shortfall beyond the slack variable is a breach.
    for (const auto& r : m.policy_regions) {
      if (y < r.target_epoch) continue;
      double supplied = 0.0, required = 0.0;
      for (int d = 0; d < data.days(y); ++d) {
        const double w = data.weight(y, d) * cfg.delta_h;
        for (int h = 0; h < H; ++h)
          for (size_t zi = 0; zi < m.zones.size(); ++zi) {
            const Zone& z = m.zones[zi];
            if (!z.region || *z.region != r.id) continue;
            required += r.rps_target * w * data.demand(y, static_cast<int>(zi), d, h);
            for (int li : data.active_lines) {
              const Line& l = m.lines[li];
              if (l.locale != Locale::Offshore) continue;
              if (l.to_zone == z.id) supplied += w * v(names::flow(y, l.id, d, h));
              else if (l.from_zone == z.id) supplied -= w * v(names::flow(y, l.id, d, h));
            }
            for (const auto& g : m.generators)
              if (g.zone == z.id && !g.dispatchable)
                supplied += w * v(names::pg(y, g.id, d, h));
          }
      }
      const double rho = v(names::rps_slack(y, r.id));
      note(rep.rps, required - supplied - rho, "policy shortfall in " + r.id);
    }
  }
  return rep;
}

inline ReplayReport replay_check(const SystemModel& m, const ScenarioSet& scen,
                                 const BuildOptions& opt, const MilpInstance& inst,
                                 const PlanSolution& sol) {
  return replay_check(m, scen, opt, inst, sol.values);
}

}  // namespace gridplan
