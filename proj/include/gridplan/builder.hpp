#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "gridplan/common.hpp"
#include "gridplan/costs.hpp"
#include "gridplan/milp.hpp"
#include "gridplan/model.hpp"
#include "gridplan/scenario.hpp"

namespace gridplan {

enum class PlanMode { SingleObjective, MultiObjective, MultiObjectiveOpoi };

inline const char* to_string(PlanMode m) {
  switch (m) {
    case PlanMode::SingleObjective: return "SO";
    case PlanMode::MultiObjective: return "MO";
    case PlanMode::MultiObjectiveOpoi: return "MO-OPOI";
  }
  return "?";
}

inline PlanMode plan_mode_from_string(const std::string& s) {
  if (s == "SO" || s == "so") return PlanMode::SingleObjective;
  if (s == "MO" || s == "mo") return PlanMode::MultiObjective;
  if (s == "MO-OPOI" || s == "mo-opoi" || s == "OPOI" || s == "opoi")
    return PlanMode::MultiObjectiveOpoi;
  throw ParseError("unknown mode '" + s + "' (expected SO, MO or MO-OPOI)");
}

struct BuildOptions {
  PlanMode mode = PlanMode::MultiObjective;
  std::optional<double> scc_override;
};

// Derived lookups shared by the program builder, the replay checker and the
// reporting code. Owns nothing; the model and scenario set must outlive it.
struct ProgramData {
  const SystemModel* model = nullptr;
  const ScenarioSet* scenarios = nullptr;
  BuildOptions options;

  EpochStructure es;
  std::vector<double> op_discount;       // per epoch
  std::vector<int> online_epoch;         // per zone; 0 for onshore
  std::vector<int> zone_col;             // model zone -> scenario column
  std::vector<int> active_lines;         // line indices in play for this mode
  std::vector<std::vector<int>> allowed; // per line index: allowed type indices
  std::vector<std::pair<int, int>> new_pairs;  // (zone, tech) with a new candidate
  std::vector<int> new_pair_gen;         // generator index per new pair
  std::vector<int> storage_zones;        // zone indices carrying storage
  double omega = 1.0;
  double scc = 0.0;
  double big_m = 0.0;

  ProgramData(const SystemModel& m, const ScenarioSet& s, const BuildOptions& opt)
      : model(&m), scenarios(&s), options(opt), es(epoch_structure(m.config)) {
    const auto& cfg = m.config;
    if (static_cast<int>(s.epochs.size()) != cfg.epochs)
      throw ModelError("scenario set covers " + std::to_string(s.epochs.size()) +
                       " epochs, config expects " + std::to_string(cfg.epochs));
    for (int y = 0; y < cfg.epochs; ++y)
      op_discount.push_back(es.operating_discount_sum(y, cfg.discount_rate));

    for (const auto& z : m.zones) online_epoch.push_back(z.online_epoch.value_or(0));

    zone_col.assign(m.zones.size(), -1);
    for (size_t zi = 0; zi < m.zones.size(); ++zi) {
      for (size_t c = 0; c < s.zones.size(); ++c)
        if (s.zones[c] == m.zones[zi].id) zone_col[zi] = static_cast<int>(c);
      if (zone_col[zi] < 0)
        throw ModelError("scenario set lacks zone " + m.zones[zi].id);
    }

    const bool opoi = options.mode == PlanMode::MultiObjectiveOpoi;
    allowed.resize(m.lines.size());
    for (size_t li = 0; li < m.lines.size(); ++li) {
      const Line& l = m.lines[li];
      if (l.status == LineStatus::Candidate && l.opoi_only && !opoi) continue;
      active_lines.push_back(static_cast<int>(li));
      if (l.status == LineStatus::Candidate)
        for (const auto& tid : l.allowed_types) {
          const LineType* t = m.find_line_type(tid);
          if (!t) throw ModelError("line " + l.id + ": unknown type " + tid);
          allowed[li].push_back(
              static_cast<int>(t - m.line_types.data()));
        }
    }

    for (size_t gi = 0; gi < m.generators.size(); ++gi) {
      const Generator& g = m.generators[gi];
      if (g.status != GenStatus::NewCandidate) continue;
      const TechnologyOption* t = m.find_tech(g.tech);
      if (!t) throw ModelError("generator " + g.id + ": unknown technology " + g.tech);
      int zi = zone_index(g.zone);
      new_pairs.push_back({zi, static_cast<int>(t - m.tech_options.data())});
      new_pair_gen.push_back(static_cast<int>(gi));
    }

    if (m.storage)
      for (size_t zi = 0; zi < m.zones.size(); ++zi)
        if (m.zones[zi].kind == ZoneKind::Onshore)
          storage_zones.push_back(static_cast<int>(zi));

    omega = options.mode == PlanMode::SingleObjective ? 0.0 : cfg.externality_weight;
    scc = options.scc_override.value_or(cfg.scc);

    if (cfg.big_m) {
      big_m = *cfg.big_m;
    } else {
      double need = 0.0;
      for (int li : active_lines) {
        const Line& l = m.lines[li];
        if (l.status == LineStatus::Candidate && l.current == CurrentKind::AC &&
            l.susceptance)
          need = std::max(need, *l.susceptance);
      }
      big_m = std::max(1.0, need * 2.0 * M_PI * 1.1);
    }
  }

  int zone_index(const std::string& id) const {
    for (size_t i = 0; i < model->zones.size(); ++i)
      if (model->zones[i].id == id) return static_cast<int>(i);
    throw ModelError("unknown zone " + id);
  }
  int days(int y) const { return static_cast<int>(scenarios->epochs[y].size()); }
  int hours() const { return scenarios->hours_per_day; }
  const ScenarioDay& day(int y, int d) const { return scenarios->epochs[y][d]; }
  double weight(int y, int d) const { return day(y, d).weight; }
  double demand(int y, int zi, int d, int h) const {
    return day(y, d).load.at(h, zone_col[zi]);
  }
  // Capacity factor of a generator's profile at its own zone.
  double cf(const Generator& g, int y, int d, int h) const {
    if (!g.profile) return 0.0;
    const auto& profs = day(y, d).profiles;
    auto it = profs.find(*g.profile);
    if (it == profs.end())
      throw ModelError("scenario day " + day(y, d).id + " lacks profile '" + *g.profile +
                       "'");
    return it->second.at(h, zone_col[zone_index(g.zone)]);
  }
  bool zone_online(int zi, int y) const { return y >= online_epoch[zi]; }
  // Lifetime gate for capacity built at epoch n, seen from epoch y.
  bool alive(int built, int y, int lifetime_years) const {
    if (y < built) return false;
    const int age = es.first_year(y) - es.first_year(built) + 1;
    return age <= lifetime_years;
  }
  double storage_decay(int built, int y) const {
    return std::pow(1.0 - model->storage->degradation,
                    es.first_year(y) - es.first_year(built));
  }
  // Variable cost of one generator in one epoch.
  double var_cost(const Generator& g, int y) const {
    if (g.status == GenStatus::NewCandidate) {
      const TechnologyOption* t = model->find_tech(g.tech);
      if (t && !t->var_om_per_mwh.empty()) return t->var_om_per_mwh[y];
    }
    return g.var_cost_per_mwh;
  }
  double externality_rate(const Generator& g) const {
    double rate = 0.0;
    auto air = g.externality_rates.find("air_quality");
    if (air != g.externality_rates.end()) rate += air->second;
    auto co2 = g.externality_rates.find("co2");
    if (co2 != g.externality_rates.end()) rate += scc * co2->second;
    return rate;
  }
};

// Assembles the expansion-planning MILP: one dispatch problem per epoch and
// representative day, coupled by investment variables and the discounted
// objective.
class ProgramBuilder {
 public:
  ProgramBuilder(const SystemModel& m, const ScenarioSet& s, const BuildOptions& opt)
      : m_(m), cfg_(m.config), data_(m, s, opt) {}

  MilpInstance build() {
    check_structure();
    inst_.name = m_.name.empty() ? "gridplan" : m_.name;
    add_variables();
    add_generator_constraints();
    add_demand_flexibility();
    add_power_balance();
    add_reserve();
    add_storage();
    add_transmission();
    add_policy();
    return std::move(inst_);
  }

  const ProgramData& data() const { return data_; }

 private:
  using VK = VarKind;

  void check_structure() {
    // Every offshore zone needs at least one in-play candidate to export over.
    for (size_t zi = 0; zi < m_.zones.size(); ++zi) {
      if (m_.zones[zi].kind != ZoneKind::Offshore) continue;
      bool any = false;
      for (int li : data_.active_lines) {
        const Line& l = m_.lines[li];
        if (l.status != LineStatus::Candidate) continue;
        if (l.from_zone == m_.zones[zi].id || l.to_zone == m_.zones[zi].id) any = true;
      }
      if (!any)
        throw ModelError("structurally infeasible: offshore zone " + m_.zones[zi].id +
                         " has no candidate line");
    }
    auto problems = check_scenarios(*data_.scenarios, cfg_.tau);
    if (!problems.empty())
      throw ModelError("invalid scenario set: " + problems.front());
  }

  // --- variables -----------------------------------------------------------

  void add_variables() {
    const int Y = cfg_.epochs;
    const int H = data_.hours();

    for (int y = 0; y < Y; ++y)
      for (size_t gi = 0; gi < m_.generators.size(); ++gi) {
        const Generator& g = m_.generators[gi];
        const int zi = data_.zone_index(g.zone);
        const bool online = data_.zone_online(zi, y);
        for (int d = 0; d < data_.days(y); ++d)
          for (int h = 0; h < H; ++h) {
            double lo = 0.0, hi = kInf;
            if (g.status == GenStatus::Existing) {
              if (!online) {
                lo = hi = 0.0;
              } else if (g.dispatchable) {
                lo = g.p_min_mw;
                hi = g.p_max_mw;
              } else {
                lo = hi = g.p_max_mw * data_.cf(g, y, d, h);
              }
            }
            const int v = inst_.add_var(names::pg(y, g.id, d, h), VK::Continuous, lo, hi);
            const double w = data_.op_discount[y] * data_.weight(y, d) * cfg_.delta_h;
            inst_.add_objective(
                v, w * (data_.var_cost(g, y) + data_.omega * data_.externality_rate(g)));
            if (g.dispatchable) {
              const double rmax = g.ramp_mw_per_hour * cfg_.delta_h_reserve;
              inst_.add_var(names::rg(y, g.id, d, h), VK::Continuous, 0.0,
                            online ? rmax : 0.0);
            }
          }
      }

    // New capacity: built per epoch plus its lifetime-windowed cumulative.
    for (size_t p = 0; p < data_.new_pairs.size(); ++p) {
      const auto [zi, ti] = data_.new_pairs[p];
      const TechnologyOption& tech = m_.tech_options[ti];
      const std::string& zid = m_.zones[zi].id;
      for (int y = 0; y < Y; ++y) {
        const int built =
            inst_.add_var(names::cap_built(y, zid, tech.id), VK::Continuous, 0.0, kInf);
        inst_.add_objective(built, crf(cfg_.discount_rate, tech.lifetime_years) *
                                       tech.capex_per_mw[y] *
                                       data_.es.investment_annuity(
                                           y, tech.lifetime_years, cfg_.discount_rate));
        const int avail =
            inst_.add_var(names::cap_avail(y, zid, tech.id), VK::Continuous, 0.0, kInf);
        inst_.add_objective(avail, data_.op_discount[y] * tech.fixed_om_per_mw_yr[y]);
      }
    }

    // Storage fleet.
    if (m_.storage) {
      const StorageSpec& st = *m_.storage;
      const double f = crf(cfg_.discount_rate, st.lifetime_years);
      for (int zi : data_.storage_zones) {
        const std::string& zid = m_.zones[zi].id;
        for (int y = 0; y < Y; ++y) {
          const double annuity =
              data_.es.investment_annuity(y, st.lifetime_years, cfg_.discount_rate);
          int v = inst_.add_var(names::st_power_built(y, zid), VK::Continuous, 0.0, kInf);
          inst_.add_objective(v, f * st.power_capex_per_mw[y] * annuity);
          v = inst_.add_var(names::st_energy_built(y, zid), VK::Continuous, 0.0, kInf);
          inst_.add_objective(v, f * st.energy_capex_per_mwh[y] * annuity);
          v = inst_.add_var(names::st_power_avail(y, zid), VK::Continuous, 0.0, kInf);
          inst_.add_objective(v, data_.op_discount[y] * st.fixed_om_per_mw_yr[y]);
          inst_.add_var(names::st_energy_avail(y, zid), VK::Continuous, 0.0, kInf);
          for (int d = 0; d < data_.days(y); ++d) {
            for (int h = 0; h < data_.hours(); ++h) {
              inst_.add_var(names::st_charge(y, zid, d, h), VK::Continuous, 0.0, kInf);
              inst_.add_var(names::st_discharge(y, zid, d, h), VK::Continuous, 0.0, kInf);
              inst_.add_var(names::st_reserve(y, zid, d, h), VK::Continuous, 0.0, kInf);
            }
            for (int p2 = 0; p2 <= data_.hours(); ++p2)
              inst_.add_var(names::soc(y, zid, d, p2), VK::Continuous, 0.0, kInf);
          }
        }
      }
    }

    // Network: flows, angles, balance slacks, demand flexibility.
    for (int y = 0; y < Y; ++y) {
      for (int li : data_.active_lines) {
        const Line& l = m_.lines[li];
        double cap = l.existing_capacity_mw;
        if (l.status == LineStatus::Candidate) {
          cap = 0.0;
          for (int ti : data_.allowed[li])
            cap = std::max(cap, m_.line_types[ti].capacity_mw);
        }
        for (int d = 0; d < data_.days(y); ++d)
          for (int h = 0; h < data_.hours(); ++h)
            inst_.add_var(names::flow(y, l.id, d, h), VK::Continuous, -cap, cap);
      }
      for (size_t zi = 0; zi < m_.zones.size(); ++zi) {
        const std::string& zid = m_.zones[zi].id;
        for (int d = 0; d < data_.days(y); ++d)
          for (int h = 0; h < data_.hours(); ++h) {
            inst_.add_var(names::angle(y, zid, d, h), VK::Continuous, -M_PI, M_PI);
            const double w = data_.op_discount[y] * data_.weight(y, d) * cfg_.delta_h;
            int v = inst_.add_var(names::curtail(y, zid, d, h), VK::Continuous, 0.0, kInf);
            inst_.add_objective(v, w * cfg_.pen_over);
            v = inst_.add_var(names::unserved(y, zid, d, h), VK::Continuous, 0.0, kInf);
            inst_.add_objective(v, w * cfg_.pen_under);
            for (const auto& b : m_.demand_blocks) {
              int up = inst_.add_var(names::flex_up(y, zid, b.id, d, h), VK::Continuous,
                                     0.0, kInf);
              int dn = inst_.add_var(names::flex_down(y, zid, b.id, d, h), VK::Continuous,
                                     0.0, kInf);
              inst_.add_objective(up, w * b.willingness_to_pay);
              inst_.add_objective(dn, w * b.willingness_to_pay);
            }
          }
      }
    }

    // Candidate line binaries: investment and availability.
    for (int y = 0; y < Y; ++y)
      for (int li : data_.active_lines) {
        const Line& l = m_.lines[li];
        if (l.status != LineStatus::Candidate) continue;
        for (int ti : data_.allowed[li]) {
          const std::string& tid = m_.line_types[ti].id;
          const int v = inst_.add_var(names::invest(y, l.id, tid), VK::Binary, 0.0, 1.0);
          inst_.add_objective(
              v, crf(cfg_.discount_rate, cfg_.line_lifetime_years) *
                     line_capital_cost(m_.line_types[ti], l.length_miles) *
                     data_.es.investment_annuity(y, cfg_.line_lifetime_years,
                                                 cfg_.discount_rate));
          inst_.add_var(names::avail(y, l.id, tid), VK::Binary, 0.0, 1.0);
        }
      }

    // Policy shortfall, one per region and epoch with an active target.
    for (int y = 0; y < Y; ++y)
      for (const auto& r : m_.policy_regions) {
        if (y < r.target_epoch) continue;
        const double hi = r.enforcement == RpsEnforcement::Strict ? 0.0 : kInf;
        const int v = inst_.add_var(names::rps_slack(y, r.id), VK::Continuous, 0.0, hi);
        if (r.enforcement == RpsEnforcement::Soft)
          inst_.add_objective(v, data_.op_discount[y] * r.penalty_per_mwh);
      }

    // Fixed O&M of the existing fleet enters as a constant.
    double offset = 0.0;
    for (int y = 0; y < Y; ++y)
      for (const auto& g : m_.generators) {
        if (g.status != GenStatus::Existing) continue;
        if (!data_.zone_online(data_.zone_index(g.zone), y)) continue;
        offset += data_.op_discount[y] * g.fixed_cost_per_mw_yr * g.p_max_mw;
      }
    inst_.objective_offset = offset;
  }

  // --- constraint families ---------------------------------------------------

  void add_generator_constraints() {
    const int H = data_.hours();
    for (int y = 0; y < cfg_.epochs; ++y)
      for (const auto& g : m_.generators) {
        if (!g.dispatchable) continue;
        for (int d = 0; d < data_.days(y); ++d)
          for (int h = 1; h < H; ++h) {
            auto& up = inst_.add_row("rampup[y" + std::to_string(y + 1) + "," + g.id +
                                         ",d" + std::to_string(d) + ",h" +
                                         std::to_string(h) + "]",
                                     "ramp_up", 'L', g.ramp_mw_per_hour);
            up.coeffs = {{inst_.require(names::pg(y, g.id, d, h)), 1.0},
                         {inst_.require(names::rg(y, g.id, d, h)), 1.0},
                         {inst_.require(names::pg(y, g.id, d, h - 1)), -1.0}};
            auto& dn = inst_.add_row("rampdn[y" + std::to_string(y + 1) + "," + g.id +
                                         ",d" + std::to_string(d) + ",h" +
                                         std::to_string(h) + "]",
                                     "ramp_down", 'G', -g.ramp_mw_per_hour);
            dn.coeffs = {{inst_.require(names::pg(y, g.id, d, h)), 1.0},
                         {inst_.require(names::pg(y, g.id, d, h - 1)), -1.0},
                         {inst_.require(names::rg(y, g.id, d, h - 1)), -1.0}};
          }
      }

    // Cumulative new capacity and its coupling to dispatch.
    for (size_t p = 0; p < data_.new_pairs.size(); ++p) {
      const auto [zi, ti] = data_.new_pairs[p];
      const TechnologyOption& tech = m_.tech_options[ti];
      const Generator& g = m_.generators[data_.new_pair_gen[p]];
      const std::string& zid = m_.zones[zi].id;
      for (int y = 0; y < cfg_.epochs; ++y) {
        auto& def = inst_.add_row("capavl[y" + std::to_string(y + 1) + "," + zid + "," +
                                      tech.id + "]",
                                  "new_capacity_avail", 'E', 0.0);
        def.coeffs.push_back({inst_.require(names::cap_avail(y, zid, tech.id)), 1.0});
        for (int n = 0; n <= y; ++n)
          if (data_.alive(n, y, tech.lifetime_years))
            def.coeffs.push_back({inst_.require(names::cap_built(n, zid, tech.id)), -1.0});

        const int avail = inst_.require(names::cap_avail(y, zid, tech.id));
        for (int d = 0; d < data_.days(y); ++d)
          for (int h = 0; h < data_.hours(); ++h) {
            const int pg = inst_.require(names::pg(y, g.id, d, h));
            if (g.dispatchable) {
              auto& row = inst_.add_row(
                  "newcap[y" + std::to_string(y + 1) + "," + g.id + ",d" +
                      std::to_string(d) + ",h" + std::to_string(h) + "]",
                  "new_capacity_cap", 'L', 0.0);
              row.coeffs = {{pg, 1.0}, {avail, -1.0}};
            } else {
              auto& row = inst_.add_row(
                  "newint[y" + std::to_string(y + 1) + "," + g.id + ",d" +
                      std::to_string(d) + ",h" + std::to_string(h) + "]",
                  "intermittent_output", 'E', 0.0);
              row.coeffs = {{pg, 1.0}, {avail, -data_.cf(g, y, d, h)}};
            }
          }
      }
    }
  }

  void add_demand_flexibility() {
    for (int y = 0; y < cfg_.epochs; ++y)
      for (size_t zi = 0; zi < m_.zones.size(); ++zi) {
        const std::string& zid = m_.zones[zi].id;
        for (int d = 0; d < data_.days(y); ++d) {
          for (int h = 0; h < data_.hours(); ++h)
            for (const auto& b : m_.demand_blocks) {
              auto& row = inst_.add_row(
                  "flexband[y" + std::to_string(y + 1) + "," + zid + "," + b.id + ",d" +
                      std::to_string(d) + ",h" + std::to_string(h) + "]",
                  "flex_band", 'L',
                  b.share * cfg_.flex_fraction * data_.demand(y, zi, d, h));
              row.coeffs = {{inst_.require(names::flex_up(y, zid, b.id, d, h)), 1.0},
                            {inst_.require(names::flex_down(y, zid, b.id, d, h)), 1.0}};
            }
          if (!m_.demand_blocks.empty()) {
            auto& neutral = inst_.add_row("flexday[y" + std::to_string(y + 1) + "," + zid +
                                              ",d" + std::to_string(d) + "]",
                                          "flex_daily_neutrality", 'E', 0.0);
            for (int h = 0; h < data_.hours(); ++h)
              for (const auto& b : m_.demand_blocks) {
                neutral.coeffs.push_back(
                    {inst_.require(names::flex_up(y, zid, b.id, d, h)), 1.0});
                neutral.coeffs.push_back(
                    {inst_.require(names::flex_down(y, zid, b.id, d, h)), -1.0});
              }
          }
        }
      }
  }

  void add_power_balance() {
    for (int y = 0; y < cfg_.epochs; ++y)
      for (size_t zi = 0; zi < m_.zones.size(); ++zi) {
        const std::string& zid = m_.zones[zi].id;
        const bool has_storage =
            m_.storage && std::count(data_.storage_zones.begin(),
                                     data_.storage_zones.end(), static_cast<int>(zi));
        for (int d = 0; d < data_.days(y); ++d)
          for (int h = 0; h < data_.hours(); ++h) {
            const double D = data_.demand(y, zi, d, h);
            auto& bal = inst_.add_row("bal[y" + std::to_string(y + 1) + "," + zid + ",d" +
                                          std::to_string(d) + ",h" + std::to_string(h) +
                                          "]",
                                      "power_balance", 'E', D);
            for (const auto& g : m_.generators)
              if (g.zone == zid)
                bal.coeffs.push_back({inst_.require(names::pg(y, g.id, d, h)), 1.0});
            for (int li : data_.active_lines) {
              const Line& l = m_.lines[li];
              if (l.from_zone == zid)
                bal.coeffs.push_back({inst_.require(names::flow(y, l.id, d, h)), -1.0});
              else if (l.to_zone == zid)
                bal.coeffs.push_back({inst_.require(names::flow(y, l.id, d, h)), 1.0});
            }
            for (const auto& b : m_.demand_blocks) {
              bal.coeffs.push_back(
                  {inst_.require(names::flex_up(y, zid, b.id, d, h)), -1.0});
              bal.coeffs.push_back(
                  {inst_.require(names::flex_down(y, zid, b.id, d, h)), 1.0});
            }
            bal.coeffs.push_back({inst_.require(names::curtail(y, zid, d, h)), -1.0});
            bal.coeffs.push_back({inst_.require(names::unserved(y, zid, d, h)), 1.0});
            if (has_storage) {
              bal.coeffs.push_back({inst_.require(names::st_charge(y, zid, d, h)), -1.0});
              bal.coeffs.push_back(
                  {inst_.require(names::st_discharge(y, zid, d, h)), 1.0});
            }

            // Unserved load cannot exceed shifted demand.
            auto& uns = inst_.add_row("unsmax[y" + std::to_string(y + 1) + "," + zid +
                                          ",d" + std::to_string(d) + ",h" +
                                          std::to_string(h) + "]",
                                      "unserved_cap", 'L', D);
            uns.coeffs.push_back({inst_.require(names::unserved(y, zid, d, h)), 1.0});
            for (const auto& b : m_.demand_blocks) {
              uns.coeffs.push_back({inst_.require(names::flex_up(y, zid, b.id, d, h)), -1.0});
              uns.coeffs.push_back({inst_.require(names::flex_down(y, zid, b.id, d, h)), 1.0});
            }

            // Curtailment is capped at a fraction of intermittent output.
            auto& cur = inst_.add_row("curmax[y" + std::to_string(y + 1) + "," + zid +
                                          ",d" + std::to_string(d) + ",h" +
                                          std::to_string(h) + "]",
                                      "curtailment_cap", 'L', 0.0);
            cur.coeffs.push_back({inst_.require(names::curtail(y, zid, d, h)), 1.0});
            for (const auto& g : m_.generators)
              if (g.zone == zid && !g.dispatchable)
                cur.coeffs.push_back(
                    {inst_.require(names::pg(y, g.id, d, h)), -cfg_.curtail_fraction});
          }
      }
  }

  void add_reserve() {
    const auto& rule = cfg_.reserve;
    for (int y = 0; y < cfg_.epochs; ++y)
      for (int d = 0; d < data_.days(y); ++d)
        for (int h = 0; h < data_.hours(); ++h) {
          if (rule.per_zone) {
            for (size_t zi = 0; zi < m_.zones.size(); ++zi)
              make_reserve_row(y, d, h, static_cast<int>(zi));
          } else {
            make_reserve_row(y, d, h, -1);
          }
        }
  }

  void make_reserve_row(int y, int d, int h, int only_zone) {
    double load = 0.0;
    const std::string suffix =
        only_zone >= 0 ? "," + m_.zones[only_zone].id : std::string{};
    auto& row = inst_.add_row("resreq[y" + std::to_string(y + 1) + suffix + ",d" +
                                  std::to_string(d) + ",h" + std::to_string(h) + "]",
                              "reserve_requirement", 'G', 0.0);
    for (size_t zi = 0; zi < m_.zones.size(); ++zi) {
      if (only_zone >= 0 && static_cast<int>(zi) != only_zone) continue;
      load += data_.demand(y, static_cast<int>(zi), d, h);
    }
    for (const auto& g : m_.generators) {
      const int zi = data_.zone_index(g.zone);
      if (only_zone >= 0 && zi != only_zone) continue;
      if (g.dispatchable)
        row.coeffs.push_back({inst_.require(names::rg(y, g.id, d, h)), 1.0});
      else
        row.coeffs.push_back(
            {inst_.require(names::pg(y, g.id, d, h)), -cfg_.reserve.intermittent_fraction});
    }
    if (m_.storage)
      for (int zi : data_.storage_zones) {
        if (only_zone >= 0 && zi != only_zone) continue;
        row.coeffs.push_back(
            {inst_.require(names::st_reserve(y, m_.zones[zi].id, d, h)), 1.0});
      }
    row.rhs = cfg_.reserve.load_fraction * load;
  }

  void add_storage() {
    if (!m_.storage) return;
    const StorageSpec& st = *m_.storage;
    const int H = data_.hours();
    const double dh = cfg_.delta_h;
    const double res_h = cfg_.delta_h_reserve * cfg_.delta_h;

    for (int zi : data_.storage_zones) {
      const std::string& zid = m_.zones[zi].id;
      for (int y = 0; y < cfg_.epochs; ++y) {
        const std::string ytag = "y" + std::to_string(y + 1) + "," + zid;
        // Available energy and power from surviving builds.
        auto& ea = inst_.add_row("stea[" + ytag + "]", "storage_energy_avail", 'E', 0.0);
        ea.coeffs.push_back({inst_.require(names::st_energy_avail(y, zid)), 1.0});
        auto& pa = inst_.add_row("stpa[" + ytag + "]", "storage_power_avail", 'E', 0.0);
        pa.coeffs.push_back({inst_.require(names::st_power_avail(y, zid)), 1.0});
        for (int n = 0; n <= y; ++n)
          if (data_.alive(n, y, st.lifetime_years)) {
            ea.coeffs.push_back({inst_.require(names::st_energy_built(n, zid)),
                                 -data_.storage_decay(n, y)});
            pa.coeffs.push_back({inst_.require(names::st_power_built(n, zid)), -1.0});
          }
        // Duration sizing couples the two builds.
        auto& dur = inst_.add_row("stdur[" + ytag + "]", "storage_duration", 'E', 0.0);
        dur.coeffs = {{inst_.require(names::st_power_built(y, zid)), st.duration_hours},
                      {inst_.require(names::st_energy_built(y, zid)), -1.0}};

        const int ea_v = inst_.require(names::st_energy_avail(y, zid));
        const int pa_v = inst_.require(names::st_power_avail(y, zid));
        for (int d = 0; d < data_.days(y); ++d) {
          const std::string dtag = ytag + ",d" + std::to_string(d);
          // Boundary state pinned to the configured fraction of capacity.
          auto& first = inst_.add_row("socbeg[" + dtag + "]", "soc_boundary", 'E', 0.0);
          first.coeffs = {{inst_.require(names::soc(y, zid, d, 0)), 1.0},
                          {ea_v, -st.soc_init}};
          auto& last = inst_.add_row("socend[" + dtag + "]", "soc_boundary", 'E', 0.0);
          last.coeffs = {{inst_.require(names::soc(y, zid, d, H)), 1.0},
                         {ea_v, -st.soc_init}};
          for (int h = 0; h < H; ++h) {
            const std::string htag = dtag + ",h" + std::to_string(h);
            auto& rec = inst_.add_row("soc[" + htag + "]", "soc_recursion", 'E', 0.0);
            rec.coeffs = {{inst_.require(names::soc(y, zid, d, h + 1)), 1.0},
                          {inst_.require(names::soc(y, zid, d, h)), -1.0},
                          {inst_.require(names::st_charge(y, zid, d, h)),
                           -st.eta_charge * dh},
                          {inst_.require(names::st_discharge(y, zid, d, h)),
                           dh / st.eta_discharge}};
            auto& ch = inst_.add_row("stch[" + htag + "]", "charge_cap", 'L', 0.0);
            ch.coeffs = {{inst_.require(names::st_charge(y, zid, d, h)), 1.0},
                         {pa_v, -1.0}};
            auto& dis = inst_.add_row("stdis[" + htag + "]", "discharge_cap", 'L', 0.0);
            dis.coeffs = {{inst_.require(names::st_discharge(y, zid, d, h)), 1.0},
                          {pa_v, -1.0}};
            auto& rp = inst_.add_row("strp[" + htag + "]", "storage_reserve_power", 'L',
                                     0.0);
            rp.coeffs = {{inst_.require(names::st_reserve(y, zid, d, h)), 1.0},
                         {inst_.require(names::st_discharge(y, zid, d, h)), 1.0},
                         {inst_.require(names::st_charge(y, zid, d, h)), -1.0},
                         {pa_v, -1.0}};
            // Reserve energy must fit above the discharge floor.
            auto& re = inst_.add_row("stre[" + htag + "]", "storage_reserve_energy", 'L',
                                     0.0);
            re.coeffs = {{inst_.require(names::st_reserve(y, zid, d, h)), res_h},
                         {inst_.require(names::st_charge(y, zid, d, h)), -res_h},
                         {inst_.require(names::soc(y, zid, d, h + 1)), -st.eta_discharge},
                         {ea_v, st.eta_discharge * st.dod}};
          }
          for (int p2 = 0; p2 <= H; ++p2) {
            const std::string ptag = dtag + ",p" + std::to_string(p2);
            auto& hi = inst_.add_row("sochi[" + ptag + "]", "soc_window_hi", 'L', 0.0);
            hi.coeffs = {{inst_.require(names::soc(y, zid, d, p2)), 1.0}, {ea_v, -1.0}};
            auto& lo = inst_.add_row("soclo[" + ptag + "]", "soc_window_lo", 'G', 0.0);
            lo.coeffs = {{inst_.require(names::soc(y, zid, d, p2)), 1.0},
                         {ea_v, -st.dod}};
          }
        }
      }
    }
  }

  void add_transmission() {
    const int Y = cfg_.epochs;
    for (int li : data_.active_lines) {
      const Line& l = m_.lines[li];
      const bool ac = l.current == CurrentKind::AC;
      if (l.status == LineStatus::Existing) {
        if (!ac) continue;  // flow-limited only
        for (int y = 0; y < Y; ++y)
          for (int d = 0; d < data_.days(y); ++d)
            for (int h = 0; h < data_.hours(); ++h) {
              auto& row = inst_.add_row("dcflow[y" + std::to_string(y + 1) + "," + l.id +
                                            ",d" + std::to_string(d) + ",h" +
                                            std::to_string(h) + "]",
                                        "dc_flow", 'E', 0.0);
              row.coeffs = {{inst_.require(names::flow(y, l.id, d, h)), 1.0},
                            {inst_.require(names::angle(y, l.from_zone, d, h)),
                             -*l.susceptance},
                            {inst_.require(names::angle(y, l.to_zone, d, h)),
                             *l.susceptance}};
            }
        continue;
      }

      // Candidate: availability bookkeeping plus flow gating.
      for (int ti : data_.allowed[li]) {
        const std::string& tid = m_.line_types[ti].id;
        for (int y = 0; y < Y; ++y) {
          auto& def = inst_.add_row("avl[y" + std::to_string(y + 1) + "," + l.id + "," +
                                        tid + "]",
                                    "line_availability", 'E', 0.0);
          def.coeffs.push_back({inst_.require(names::avail(y, l.id, tid)), 1.0});
          for (int n = 0; n + cfg_.build_delay <= y; ++n)
            def.coeffs.push_back({inst_.require(names::invest(n, l.id, tid)), -1.0});
        }
      }
      auto& once = inst_.add_row("once[" + l.id + "]", "line_invest_once", 'L', 1.0);
      for (int ti : data_.allowed[li])
        for (int y = 0; y < Y; ++y)
          once.coeffs.push_back(
              {inst_.require(names::invest(y, l.id, m_.line_types[ti].id)), 1.0});

      for (int y = 0; y < Y; ++y)
        for (int d = 0; d < data_.days(y); ++d)
          for (int h = 0; h < data_.hours(); ++h) {
            const std::string tag = "y" + std::to_string(y + 1) + "," + l.id + ",d" +
                                    std::to_string(d) + ",h" + std::to_string(h);
            const int f = inst_.require(names::flow(y, l.id, d, h));
            auto& ub = inst_.add_row("cfub[" + tag + "]", "candidate_flow_ub", 'L', 0.0);
            ub.coeffs.push_back({f, 1.0});
            auto& lb = inst_.add_row("cflb[" + tag + "]", "candidate_flow_lb", 'L', 0.0);
            lb.coeffs.push_back({f, -1.0});
            for (int ti : data_.allowed[li]) {
              const double cap = m_.line_types[ti].capacity_mw;
              const int z = inst_.require(names::avail(y, l.id, m_.line_types[ti].id));
              ub.coeffs.push_back({z, -cap});
              lb.coeffs.push_back({z, -cap});
            }
            if (ac) {
              const double B = *l.susceptance;
              const int thf = inst_.require(names::angle(y, l.from_zone, d, h));
              const int tht = inst_.require(names::angle(y, l.to_zone, d, h));
              for (int ti : data_.allowed[li]) {
                const std::string& tid = m_.line_types[ti].id;
                const int z = inst_.require(names::avail(y, l.id, tid));
                auto& up = inst_.add_row("bigmub[" + tag + "," + tid + "]",
                                         "candidate_flow_def_ub", 'L', data_.big_m);
                up.coeffs = {{f, 1.0}, {thf, -B}, {tht, B}, {z, data_.big_m}};
                auto& dn = inst_.add_row("bigmlb[" + tag + "," + tid + "]",
                                         "candidate_flow_def_lb", 'L', data_.big_m);
                dn.coeffs = {{f, -1.0}, {thf, B}, {tht, -B}, {z, data_.big_m}};
              }
            }
          }
    }

    // Offshore integration: a line must be available once the zone is online.
    for (size_t zi = 0; zi < m_.zones.size(); ++zi) {
      const Zone& z = m_.zones[zi];
      if (z.kind != ZoneKind::Offshore) continue;
      for (int y = data_.online_epoch[zi]; y < Y; ++y) {
        auto& row = inst_.add_row("osexp[y" + std::to_string(y + 1) + "," + z.id + "]",
                                  "offshore_export", 'G', 1.0);
        for (int li : data_.active_lines) {
          const Line& l = m_.lines[li];
          if (l.status != LineStatus::Candidate) continue;
          if (l.from_zone != z.id && l.to_zone != z.id) continue;
          for (int ti : data_.allowed[li])
            row.coeffs.push_back(
                {inst_.require(names::avail(y, l.id, m_.line_types[ti].id)), 1.0});
        }
      }
    }
  }

  void add_policy() {
    for (const auto& r : m_.policy_regions) {
      std::vector<int> zones_in;
      for (size_t zi = 0; zi < m_.zones.size(); ++zi)
        if (m_.zones[zi].region && *m_.zones[zi].region == r.id)
          zones_in.push_back(static_cast<int>(zi));
      for (int y = r.target_epoch; y < cfg_.epochs; ++y) {
        double rhs = 0.0;
        auto& row = inst_.add_row("rps[y" + std::to_string(y + 1) + "," + r.id + "]",
                                  "rps", 'G', 0.0);
        for (int d = 0; d < data_.days(y); ++d) {
          const double w = data_.weight(y, d) * cfg_.delta_h;
          for (int h = 0; h < data_.hours(); ++h) {
            for (int zi : zones_in) {
              rhs += r.rps_target * w * data_.demand(y, zi, d, h);
              const std::string& zid = m_.zones[zi].id;
              // Net import over offshore-locale lines landing in the region.
              for (int li : data_.active_lines) {
                const Line& l = m_.lines[li];
                if (l.locale != Locale::Offshore) continue;
                double sign = 0.0;
                if (l.to_zone == zid) sign = 1.0;
                else if (l.from_zone == zid) sign = -1.0;
                else continue;
                row.coeffs.push_back(
                    {inst_.require(names::flow(y, l.id, d, h)), sign * w});
              }
              for (const auto& g : m_.generators)
                if (g.zone == zid && !g.dispatchable)
                  row.coeffs.push_back({inst_.require(names::pg(y, g.id, d, h)), w});
            }
          }
        }
        row.coeffs.push_back({inst_.require(names::rps_slack(y, r.id)), 1.0});
        row.rhs = rhs;
      }
    }
  }

  const SystemModel& m_;
  const PlanningConfig& cfg_;
  ProgramData data_;
  MilpInstance inst_;
};

inline MilpInstance build_program(const SystemModel& m, const ScenarioSet& s,
                                  const BuildOptions& opt = {}) {
  return ProgramBuilder(m, s, opt).build();
}

}  // namespace gridplan
