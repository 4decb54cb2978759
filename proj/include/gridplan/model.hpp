#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "gridplan/common.hpp"

namespace gridplan {

// Zonal planning data model. Epoch indices are 0-based internally; input and
// output files number epochs from 1.

enum class ZoneKind { Onshore, Offshore };

struct Zone {
  std::string id;
  ZoneKind kind = ZoneKind::Onshore;
  std::optional<int> online_epoch;    // offshore commissioning epoch
  std::optional<std::string> region;  // policy region, onshore only
};

enum class CurrentKind { AC, DC };
enum class LineStatus { Existing, Candidate };
enum class Locale { Onshore, Offshore };

struct Line {
  std::string id;
  std::string from_zone;
  std::string to_zone;
  CurrentKind current = CurrentKind::AC;
  LineStatus status = LineStatus::Existing;
  Locale locale = Locale::Onshore;
  std::optional<double> susceptance;  // MW per rad, AC lines only
  double length_miles = 0.0;
  std::vector<std::string> allowed_types;  // candidate lines
  double existing_capacity_mw = 0.0;       // existing lines
  bool opoi_only = false;  // candidate considered only when POIs are optimized
};

enum class LineCostModel { FixedPerLine, PerMwMile, AffineInLength, QuadraticInLength };

// Capital cost of building one line of this type. FixedPerLine/Affine/
// Quadratic evaluate in million $ as a function of route length; PerMwMile is
// $ per MW-mile applied to the type capacity.
struct LineType {
  std::string id;
  double capacity_mw = 0.0;
  LineCostModel cost_model = LineCostModel::FixedPerLine;
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double per_mw_mile = 0.0;
};

enum class GenStatus { Existing, NewCandidate };

struct Generator {
  std::string id;
  std::string zone;
  std::string tech;
  bool dispatchable = true;
  GenStatus status = GenStatus::Existing;
  double p_min_mw = 0.0;
  double p_max_mw = 0.0;
  double ramp_mw_per_hour = 0.0;
  double var_cost_per_mwh = 0.0;
  double fixed_cost_per_mw_yr = 0.0;
  // Keyed damage rates: "co2" in t/MWh (priced at the configured carbon
  // cost), "air_quality" in $/MWh (applied directly).
  std::map<std::string, double> externality_rates;
  std::optional<std::string> profile;  // capacity-factor series, intermittents
};

struct TechnologyOption {
  std::string id;
  std::vector<double> capex_per_mw;        // one entry per epoch
  std::vector<double> fixed_om_per_mw_yr;  // one entry per epoch
  std::vector<double> var_om_per_mwh;      // one entry per epoch
  int lifetime_years = 1;
  std::vector<std::string> buildable_zones;
};

struct StorageSpec {
  std::vector<double> power_capex_per_mw;    // one entry per epoch
  std::vector<double> energy_capex_per_mwh;  // one entry per epoch
  std::vector<double> fixed_om_per_mw_yr;    // one entry per epoch
  double eta_charge = 1.0;
  double eta_discharge = 1.0;
  double dod = 0.0;          // floor on SoC as a fraction of energy capacity
  double degradation = 0.0;  // fraction of energy capacity lost per year
  double duration_hours = 1.0;
  double soc_init = 0.0;     // boundary SoC as a fraction of energy capacity
  int lifetime_years = 1;
};

struct DemandBlock {
  std::string id;
  double willingness_to_pay = 0.0;  // $/MWh, paid on |shift|
  double share = 0.0;               // fraction of the flexible band
};

enum class RpsEnforcement { Strict, Soft };

struct PolicyRegion {
  std::string id;
  double rps_target = 0.0;
  int target_epoch = 0;  // first epoch the target binds; may lie past horizon
  RpsEnforcement enforcement = RpsEnforcement::Strict;
  double penalty_per_mwh = 0.0;  // soft enforcement price on the shortfall
};

struct ReserveRule {
  double load_fraction = 0.03;
  double intermittent_fraction = 0.05;
  bool per_zone = false;  // default requirement is system-wide
};

struct PlanningConfig {
  int epochs = 4;
  int years_per_epoch = 5;
  double discount_rate = 0.05;
  int tau = 365;  // days per year
  double pen_under = 5000.0;  // $/MWh unserved
  double pen_over = 0.0;      // $/MWh curtailed
  double flex_fraction = 0.10;
  double curtail_fraction = 0.5;
  ReserveRule reserve;
  double delta_h = 1.0;             // model resolution, hours
  double delta_h_reserve = 1.0 / 6.0;  // reserve delivery window, fraction of delta_h
  int build_delay = 0;              // epochs between line investment and availability
  double externality_weight = 1.0;  // multiplier on externality cost (0 disables)
  double scc = 51.0;                // $/t CO2
  std::optional<double> big_m;      // derived from susceptances when absent
  double mip_gap = 1e-4;
  double load_growth = 0.0;         // fraction per year, applied before clustering
  int line_lifetime_years = 40;
  std::string currency_year;        // label only
};

// Hour-by-zone table (row-major). Used for source-year load and for
// capacity-factor profiles.
struct HourlyTable {
  std::vector<std::string> zones;
  std::vector<double> values;

  int hours() const {
    return zones.empty() ? 0 : static_cast<int>(values.size() / zones.size());
  }
  double at(int hour, int zone) const {
    return values[static_cast<size_t>(hour) * zones.size() + zone];
  }
  double& at(int hour, int zone) {
    return values[static_cast<size_t>(hour) * zones.size() + zone];
  }
};

struct SystemModel {
  std::string name;
  std::vector<Zone> zones;
  std::vector<Line> lines;
  std::vector<LineType> line_types;
  std::vector<Generator> generators;
  std::vector<TechnologyOption> tech_options;
  std::optional<StorageSpec> storage;
  std::vector<DemandBlock> demand_blocks;
  std::vector<PolicyRegion> policy_regions;
  PlanningConfig config;
  std::optional<HourlyTable> demand;            // source-year MW per zone-hour
  std::map<std::string, HourlyTable> profiles;  // CF series by id

  const Zone* find_zone(const std::string& id) const {
    for (const auto& z : zones)
      if (z.id == id) return &z;
    return nullptr;
  }
  const LineType* find_line_type(const std::string& id) const {
    for (const auto& t : line_types)
      if (t.id == id) return &t;
    return nullptr;
  }
  const TechnologyOption* find_tech(const std::string& id) const {
    for (const auto& t : tech_options)
      if (t.id == id) return &t;
    return nullptr;
  }
};

// Lookup tables shared by the program builder, the replay checker and the
// report writers.
struct ModelIndex {
  std::unordered_map<std::string, int> zone;
  std::unordered_map<std::string, int> line;
  std::unordered_map<std::string, int> line_type;
  std::unordered_map<std::string, int> generator;
  std::unordered_map<std::string, int> tech;
  std::unordered_map<std::string, int> region;

  explicit ModelIndex(const SystemModel& m) {
    for (size_t i = 0; i < m.zones.size(); ++i) zone[m.zones[i].id] = static_cast<int>(i);
    for (size_t i = 0; i < m.lines.size(); ++i) line[m.lines[i].id] = static_cast<int>(i);
    for (size_t i = 0; i < m.line_types.size(); ++i)
      line_type[m.line_types[i].id] = static_cast<int>(i);
    for (size_t i = 0; i < m.generators.size(); ++i)
      generator[m.generators[i].id] = static_cast<int>(i);
    for (size_t i = 0; i < m.tech_options.size(); ++i)
      tech[m.tech_options[i].id] = static_cast<int>(i);
    for (size_t i = 0; i < m.policy_regions.size(); ++i)
      region[m.policy_regions[i].id] = static_cast<int>(i);
  }
};

}  // namespace gridplan
