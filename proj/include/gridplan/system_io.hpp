#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridplan/common.hpp"
#include "gridplan/model.hpp"

namespace gridplan {

using nlohmann::json;

struct Violation {
  std::string entity;
  std::string rule;
};

namespace detail {

inline bool valid_identifier(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.')
      return false;
  return true;
}

inline const json& need(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end())
    throw ParseError(where + ": missing field '" + key + "'");
  return *it;
}

template <typename T>
T get(const json& j, const char* key, const std::string& where) {
  try {
    return need(j, key, where).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(where + ": field '" + key + "': " + e.what());
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  return it->get<T>();
}

// Accepts either a scalar (broadcast) or an array of length `epochs`.
inline std::vector<double> epoch_series(const json& j, const char* key, int epochs,
                                        const std::string& where, double fallback = 0.0) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::vector<double>(epochs, fallback);
  if (it->is_number()) return std::vector<double>(epochs, it->get<double>());
  if (it->is_array()) {
    auto v = it->get<std::vector<double>>();
    if (static_cast<int>(v.size()) != epochs)
      throw ParseError(where + ": field '" + key + "' must have one entry per epoch");
    return v;
  }
  throw ParseError(where + ": field '" + key + "' must be a number or an array");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// CSV time series: header row of zone ids, one row per hour, '.' decimals.

inline HourlyTable read_hourly_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open time-series file " + path.string());
  HourlyTable table;
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  {
    std::stringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) table.zones.push_back(cell);
  }
  if (table.zones.empty()) throw ParseError(path.string() + ": header row has no columns");
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    size_t col = 0;
    while (std::getline(row, cell, ',')) {
      if (col >= table.zones.size())
        throw ParseError(path.string() + ":" + std::to_string(lineno) + ": too many columns");
      char* end = nullptr;
      double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0')
        throw ParseError(path.string() + ":" + std::to_string(lineno) + ": bad number '" +
                         cell + "'");
      if (!std::isfinite(v))
        throw ParseError(path.string() + ":" + std::to_string(lineno) + ": non-finite value");
      table.values.push_back(v);
      ++col;
    }
    if (col != table.zones.size())
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                       std::to_string(table.zones.size()) + " columns, got " +
                       std::to_string(col));
  }
  return table;
}

inline void write_hourly_csv(const HourlyTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (size_t c = 0; c < table.zones.size(); ++c)
    out << (c ? "," : "") << table.zones[c];
  out << '\n';
  char buf[32];
  for (int h = 0; h < table.hours(); ++h) {
    for (size_t c = 0; c < table.zones.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", table.at(h, static_cast<int>(c)));
      out << (c ? "," : "") << buf;
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// JSON <-> model

namespace detail {

inline std::string enum_str(ZoneKind k) { return k == ZoneKind::Onshore ? "onshore" : "offshore"; }
inline std::string enum_str(CurrentKind k) { return k == CurrentKind::AC ? "ac" : "dc"; }
inline std::string enum_str(LineStatus s) {
  return s == LineStatus::Existing ? "existing" : "candidate";
}
inline std::string enum_str(Locale l) { return l == Locale::Onshore ? "onshore" : "offshore"; }
inline std::string enum_str(GenStatus s) { return s == GenStatus::Existing ? "existing" : "new"; }
inline std::string enum_str(RpsEnforcement e) {
  return e == RpsEnforcement::Strict ? "strict" : "soft";
}
inline std::string enum_str(LineCostModel m) {
  switch (m) {
    case LineCostModel::FixedPerLine: return "fixed_per_line";
    case LineCostModel::PerMwMile: return "per_mw_mile";
    case LineCostModel::AffineInLength: return "affine_in_length";
    case LineCostModel::QuadraticInLength: return "quadratic_in_length";
  }
  return "?";
}

template <typename E>
E parse_enum(const std::string& s, std::initializer_list<std::pair<const char*, E>> table,
             const std::string& where) {
  for (const auto& [name, value] : table)
    if (s == name) return value;
  throw ParseError(where + ": unknown value '" + s + "'");
}

}  // namespace detail

inline json config_to_json(const PlanningConfig& c) {
  json j;
  j["epochs"] = c.epochs;
  j["years_per_epoch"] = c.years_per_epoch;
  j["discount_rate"] = c.discount_rate;
  j["tau"] = c.tau;
  j["pen_under"] = c.pen_under;
  j["pen_over"] = c.pen_over;
  j["flex_fraction"] = c.flex_fraction;
  j["curtail_fraction"] = c.curtail_fraction;
  j["reserve"] = {{"load_fraction", c.reserve.load_fraction},
                  {"intermittent_fraction", c.reserve.intermittent_fraction},
                  {"per_zone", c.reserve.per_zone}};
  j["delta_h"] = c.delta_h;
  j["delta_h_reserve"] = c.delta_h_reserve;
  j["build_delay"] = c.build_delay;
  j["externality_weight"] = c.externality_weight;
  j["scc"] = c.scc;
  if (c.big_m) j["big_m"] = *c.big_m;
  j["mip_gap"] = c.mip_gap;
  j["load_growth"] = c.load_growth;
  j["line_lifetime_years"] = c.line_lifetime_years;
  if (!c.currency_year.empty()) j["currency_year"] = c.currency_year;
  return j;
}

inline PlanningConfig config_from_json(const json& j) {
  PlanningConfig c;
  const std::string where = "config";
  c.epochs = detail::get_or(j, "epochs", c.epochs);
  c.years_per_epoch = detail::get_or(j, "years_per_epoch", c.years_per_epoch);
  c.discount_rate = detail::get_or(j, "discount_rate", c.discount_rate);
  c.tau = detail::get_or(j, "tau", c.tau);
  c.pen_under = detail::get_or(j, "pen_under", c.pen_under);
  c.pen_over = detail::get_or(j, "pen_over", c.pen_over);
  c.flex_fraction = detail::get_or(j, "flex_fraction", c.flex_fraction);
  c.curtail_fraction = detail::get_or(j, "curtail_fraction", c.curtail_fraction);
  if (j.contains("reserve")) {
    const json& r = j["reserve"];
    c.reserve.load_fraction = detail::get_or(r, "load_fraction", c.reserve.load_fraction);
    c.reserve.intermittent_fraction =
        detail::get_or(r, "intermittent_fraction", c.reserve.intermittent_fraction);
    c.reserve.per_zone = detail::get_or(r, "per_zone", c.reserve.per_zone);
  }
  c.delta_h = detail::get_or(j, "delta_h", c.delta_h);
  c.delta_h_reserve = detail::get_or(j, "delta_h_reserve", c.delta_h_reserve);
  c.build_delay = detail::get_or(j, "build_delay", c.build_delay);
  c.externality_weight = detail::get_or(j, "externality_weight", c.externality_weight);
  c.scc = detail::get_or(j, "scc", c.scc);
  if (j.contains("big_m") && !j["big_m"].is_null()) c.big_m = j["big_m"].get<double>();
  c.mip_gap = detail::get_or(j, "mip_gap", c.mip_gap);
  c.load_growth = detail::get_or(j, "load_growth", c.load_growth);
  c.line_lifetime_years = detail::get_or(j, "line_lifetime_years", c.line_lifetime_years);
  c.currency_year = detail::get_or<std::string>(j, "currency_year", "");
  if (c.epochs < 1 || c.years_per_epoch < 1)
    throw ParseError(where + ": epochs and years_per_epoch must be positive");
  return c;
}

// Serializes everything except the time-series tables themselves; the
// `time_series` member records the CSV file names.
inline json system_to_json(const SystemModel& m,
                           const std::map<std::string, std::string>& series_files = {}) {
  json j;
  j["name"] = m.name;
  j["config"] = config_to_json(m.config);

  j["zones"] = json::array();
  for (const auto& z : m.zones) {
    json zj;
    zj["id"] = z.id;
    zj["kind"] = detail::enum_str(z.kind);
    if (z.online_epoch) zj["online_epoch"] = *z.online_epoch + 1;
    if (z.region) zj["region"] = *z.region;
    j["zones"].push_back(zj);
  }

  j["line_types"] = json::array();
  for (const auto& t : m.line_types) {
    json tj;
    tj["id"] = t.id;
    tj["capacity_mw"] = t.capacity_mw;
    json cj;
    cj["model"] = detail::enum_str(t.cost_model);
    switch (t.cost_model) {
      case LineCostModel::FixedPerLine: cj["c0"] = t.c0; break;
      case LineCostModel::PerMwMile: cj["rate_per_mw_mile"] = t.per_mw_mile; break;
      case LineCostModel::AffineInLength:
        cj["c0"] = t.c0;
        cj["c1"] = t.c1;
        break;
      case LineCostModel::QuadraticInLength:
        cj["c0"] = t.c0;
        cj["c1"] = t.c1;
        cj["c2"] = t.c2;
        break;
    }
    tj["cost"] = cj;
    j["line_types"].push_back(tj);
  }

  j["lines"] = json::array();
  for (const auto& l : m.lines) {
    json lj;
    lj["id"] = l.id;
    lj["from"] = l.from_zone;
    lj["to"] = l.to_zone;
    lj["current"] = detail::enum_str(l.current);
    lj["status"] = detail::enum_str(l.status);
    lj["locale"] = detail::enum_str(l.locale);
    if (l.susceptance) lj["susceptance"] = *l.susceptance;
    lj["length_miles"] = l.length_miles;
    if (l.status == LineStatus::Candidate) {
      lj["allowed_types"] = l.allowed_types;
      if (l.opoi_only) lj["opoi_only"] = true;
    } else {
      lj["capacity_mw"] = l.existing_capacity_mw;
    }
    j["lines"].push_back(lj);
  }

  j["technologies"] = json::array();
  for (const auto& t : m.tech_options) {
    json tj;
    tj["id"] = t.id;
    tj["capex_per_mw"] = t.capex_per_mw;
    tj["fixed_om_per_mw_yr"] = t.fixed_om_per_mw_yr;
    tj["var_om_per_mwh"] = t.var_om_per_mwh;
    tj["lifetime_years"] = t.lifetime_years;
    tj["buildable_zones"] = t.buildable_zones;
    j["technologies"].push_back(tj);
  }

  j["generators"] = json::array();
  for (const auto& g : m.generators) {
    json gj;
    gj["id"] = g.id;
    gj["zone"] = g.zone;
    gj["tech"] = g.tech;
    gj["dispatchable"] = g.dispatchable;
    gj["status"] = detail::enum_str(g.status);
    gj["p_min_mw"] = g.p_min_mw;
    gj["p_max_mw"] = g.p_max_mw;
    gj["ramp_mw_per_hour"] = g.ramp_mw_per_hour;
    gj["var_cost_per_mwh"] = g.var_cost_per_mwh;
    gj["fixed_cost_per_mw_yr"] = g.fixed_cost_per_mw_yr;
    gj["externality_rates"] = g.externality_rates;
    if (g.profile) gj["profile"] = *g.profile;
    j["generators"].push_back(gj);
  }

  if (m.storage) {
    const auto& s = *m.storage;
    json sj;
    sj["power_capex_per_mw"] = s.power_capex_per_mw;
    sj["energy_capex_per_mwh"] = s.energy_capex_per_mwh;
    sj["fixed_om_per_mw_yr"] = s.fixed_om_per_mw_yr;
    sj["eta_charge"] = s.eta_charge;
    sj["eta_discharge"] = s.eta_discharge;
    sj["dod"] = s.dod;
    sj["degradation"] = s.degradation;
    sj["duration_hours"] = s.duration_hours;
    sj["soc_init"] = s.soc_init;
    sj["lifetime_years"] = s.lifetime_years;
    j["storage"] = sj;
  }

  j["demand_blocks"] = json::array();
  for (const auto& b : m.demand_blocks)
    j["demand_blocks"].push_back(
        {{"id", b.id}, {"willingness_to_pay", b.willingness_to_pay}, {"share", b.share}});

  j["policy_regions"] = json::array();
  for (const auto& p : m.policy_regions) {
    json pj;
    pj["id"] = p.id;
    pj["rps_target"] = p.rps_target;
    pj["target_epoch"] = p.target_epoch + 1;
    pj["enforcement"] = detail::enum_str(p.enforcement);
    if (p.enforcement == RpsEnforcement::Soft) pj["penalty_per_mwh"] = p.penalty_per_mwh;
    j["policy_regions"].push_back(pj);
  }

  if (!series_files.empty()) {
    json ts;
    auto it = series_files.find("demand");
    if (it != series_files.end()) ts["demand"] = it->second;
    json prof = json::object();
    for (const auto& [k, v] : series_files)
      if (k != "demand") prof[k] = v;
    if (!prof.empty()) ts["profiles"] = prof;
    j["time_series"] = ts;
  }
  return j;
}

inline SystemModel system_from_json(const json& j, const std::filesystem::path& base_dir) {
  SystemModel m;
  m.name = detail::get_or<std::string>(j, "name", "");
  if (j.contains("config")) m.config = config_from_json(j["config"]);
  const int epochs = m.config.epochs;

  for (const json& zj : detail::get_or(j, "zones", json::array())) {
    Zone z;
    z.id = detail::get<std::string>(zj, "id", "zone");
    const std::string where = "zone '" + z.id + "'";
    z.kind = detail::parse_enum<ZoneKind>(
        detail::get_or<std::string>(zj, "kind", "onshore"),
        {{"onshore", ZoneKind::Onshore}, {"offshore", ZoneKind::Offshore}}, where);
    if (zj.contains("online_epoch") && !zj["online_epoch"].is_null())
      z.online_epoch = zj["online_epoch"].get<int>() - 1;
    if (zj.contains("region") && !zj["region"].is_null())
      z.region = zj["region"].get<std::string>();
    m.zones.push_back(std::move(z));
  }

  for (const json& tj : detail::get_or(j, "line_types", json::array())) {
    LineType t;
    t.id = detail::get<std::string>(tj, "id", "line_type");
    const std::string where = "line_type '" + t.id + "'";
    t.capacity_mw = detail::get<double>(tj, "capacity_mw", where);
    const json& cj = detail::need(tj, "cost", where);
    t.cost_model = detail::parse_enum<LineCostModel>(
        detail::get<std::string>(cj, "model", where),
        {{"fixed_per_line", LineCostModel::FixedPerLine},
         {"per_mw_mile", LineCostModel::PerMwMile},
         {"affine_in_length", LineCostModel::AffineInLength},
         {"quadratic_in_length", LineCostModel::QuadraticInLength}},
        where);
    t.c0 = detail::get_or(cj, "c0", 0.0);
    t.c1 = detail::get_or(cj, "c1", 0.0);
    t.c2 = detail::get_or(cj, "c2", 0.0);
    t.per_mw_mile = detail::get_or(cj, "rate_per_mw_mile", 0.0);
    m.line_types.push_back(std::move(t));
  }

  for (const json& lj : detail::get_or(j, "lines", json::array())) {
    Line l;
    l.id = detail::get<std::string>(lj, "id", "line");
    const std::string where = "line '" + l.id + "'";
    l.from_zone = detail::get<std::string>(lj, "from", where);
    l.to_zone = detail::get<std::string>(lj, "to", where);
    l.current = detail::parse_enum<CurrentKind>(
        detail::get_or<std::string>(lj, "current", "ac"),
        {{"ac", CurrentKind::AC}, {"dc", CurrentKind::DC}}, where);
    l.status = detail::parse_enum<LineStatus>(
        detail::get_or<std::string>(lj, "status", "existing"),
        {{"existing", LineStatus::Existing}, {"candidate", LineStatus::Candidate}}, where);
    l.locale = detail::parse_enum<Locale>(
        detail::get_or<std::string>(lj, "locale", "onshore"),
        {{"onshore", Locale::Onshore}, {"offshore", Locale::Offshore}}, where);
    if (lj.contains("susceptance") && !lj["susceptance"].is_null())
      l.susceptance = lj["susceptance"].get<double>();
    l.length_miles = detail::get_or(lj, "length_miles", 0.0);
    l.allowed_types = detail::get_or(lj, "allowed_types", std::vector<std::string>{});
    l.existing_capacity_mw = detail::get_or(lj, "capacity_mw", 0.0);
    l.opoi_only = detail::get_or(lj, "opoi_only", false);
    m.lines.push_back(std::move(l));
  }

  for (const json& tj : detail::get_or(j, "technologies", json::array())) {
    TechnologyOption t;
    t.id = detail::get<std::string>(tj, "id", "technology");
    const std::string where = "technology '" + t.id + "'";
    t.capex_per_mw = detail::epoch_series(tj, "capex_per_mw", epochs, where);
    t.fixed_om_per_mw_yr = detail::epoch_series(tj, "fixed_om_per_mw_yr", epochs, where);
    t.var_om_per_mwh = detail::epoch_series(tj, "var_om_per_mwh", epochs, where);
    t.lifetime_years = detail::get_or(tj, "lifetime_years", 1);
    t.buildable_zones = detail::get_or(tj, "buildable_zones", std::vector<std::string>{});
    m.tech_options.push_back(std::move(t));
  }

  for (const json& gj : detail::get_or(j, "generators", json::array())) {
    Generator g;
    g.id = detail::get<std::string>(gj, "id", "generator");
    const std::string where = "generator '" + g.id + "'";
    g.zone = detail::get<std::string>(gj, "zone", where);
    g.tech = detail::get_or<std::string>(gj, "tech", "");
    g.dispatchable = detail::get_or(gj, "dispatchable", true);
    g.status = detail::parse_enum<GenStatus>(
        detail::get_or<std::string>(gj, "status", "existing"),
        {{"existing", GenStatus::Existing}, {"new", GenStatus::NewCandidate}}, where);
    g.p_min_mw = detail::get_or(gj, "p_min_mw", 0.0);
    g.p_max_mw = detail::get_or(gj, "p_max_mw", 0.0);
    g.ramp_mw_per_hour = detail::get_or(gj, "ramp_mw_per_hour", 0.0);
    g.var_cost_per_mwh = detail::get_or(gj, "var_cost_per_mwh", 0.0);
    g.fixed_cost_per_mw_yr = detail::get_or(gj, "fixed_cost_per_mw_yr", 0.0);
    g.externality_rates =
        detail::get_or(gj, "externality_rates", std::map<std::string, double>{});
    if (gj.contains("profile") && !gj["profile"].is_null())
      g.profile = gj["profile"].get<std::string>();
    // Clean-by-construction units default to zero damage rates.
    if (!g.dispatchable && g.externality_rates.empty())
      g.externality_rates = {{"air_quality", 0.0}, {"co2", 0.0}};
    m.generators.push_back(std::move(g));
  }

  if (j.contains("storage") && !j["storage"].is_null()) {
    const json& sj = j["storage"];
    StorageSpec s;
    const std::string where = "storage";
    s.power_capex_per_mw = detail::epoch_series(sj, "power_capex_per_mw", epochs, where);
    s.energy_capex_per_mwh = detail::epoch_series(sj, "energy_capex_per_mwh", epochs, where);
    s.fixed_om_per_mw_yr = detail::epoch_series(sj, "fixed_om_per_mw_yr", epochs, where);
    s.eta_charge = detail::get_or(sj, "eta_charge", 1.0);
    s.eta_discharge = detail::get_or(sj, "eta_discharge", 1.0);
    s.dod = detail::get_or(sj, "dod", 0.0);
    s.degradation = detail::get_or(sj, "degradation", 0.0);
    s.duration_hours = detail::get_or(sj, "duration_hours", 1.0);
    s.soc_init = detail::get_or(sj, "soc_init", 0.5);
    s.lifetime_years = detail::get_or(sj, "lifetime_years", 1);
    m.storage = s;
  }

  for (const json& bj : detail::get_or(j, "demand_blocks", json::array())) {
    DemandBlock b;
    b.id = detail::get<std::string>(bj, "id", "demand_block");
    b.willingness_to_pay =
        detail::get<double>(bj, "willingness_to_pay", "demand_block '" + b.id + "'");
    b.share = detail::get_or(bj, "share", 0.0);
    m.demand_blocks.push_back(std::move(b));
  }

  for (const json& pj : detail::get_or(j, "policy_regions", json::array())) {
    PolicyRegion p;
    p.id = detail::get<std::string>(pj, "id", "policy_region");
    const std::string where = "policy_region '" + p.id + "'";
    p.rps_target = detail::get<double>(pj, "rps_target", where);
    p.target_epoch = detail::get_or(pj, "target_epoch", 1) - 1;
    p.enforcement = detail::parse_enum<RpsEnforcement>(
        detail::get_or<std::string>(pj, "enforcement", "strict"),
        {{"strict", RpsEnforcement::Strict}, {"soft", RpsEnforcement::Soft}}, where);
    p.penalty_per_mwh = detail::get_or(pj, "penalty_per_mwh", 0.0);
    m.policy_regions.push_back(std::move(p));
  }

  if (j.contains("time_series") && !j["time_series"].is_null()) {
    const json& ts = j["time_series"];
    if (ts.contains("demand"))
      m.demand = read_hourly_csv(base_dir / ts["demand"].get<std::string>());
    if (ts.contains("profiles"))
      for (auto it = ts["profiles"].begin(); it != ts["profiles"].end(); ++it)
        m.profiles[it.key()] = read_hourly_csv(base_dir / it.value().get<std::string>());
  }
  return m;
}

// ---------------------------------------------------------------------------
// Validation

inline std::vector<Violation> validate_system(const SystemModel& m) {
  std::vector<Violation> out;
  auto flag = [&out](const std::string& entity, const std::string& rule) {
    out.push_back({entity, rule});
  };
  const auto& cfg = m.config;

  auto frac = [&](double v, const std::string& name) {
    if (!(v >= 0.0 && v <= 1.0)) flag("config", name + " out of range [0,1]");
  };
  if (cfg.epochs < 1) flag("config", "epochs must be >= 1");
  if (cfg.years_per_epoch < 1) flag("config", "years_per_epoch must be >= 1");
  if (cfg.tau < 1) flag("config", "tau must be >= 1");
  if (!(cfg.discount_rate > 0.0)) flag("config", "discount_rate must be positive");
  frac(cfg.flex_fraction, "flex_fraction");
  frac(cfg.curtail_fraction, "curtail_fraction");
  frac(cfg.reserve.load_fraction, "reserve.load_fraction");
  frac(cfg.reserve.intermittent_fraction, "reserve.intermittent_fraction");
  frac(cfg.delta_h_reserve, "delta_h_reserve");
  if (cfg.pen_under < 0 || cfg.pen_over < 0) flag("config", "penalties must be >= 0");
  if (cfg.mip_gap < 0) flag("config", "mip_gap must be >= 0");
  if (cfg.build_delay < 0) flag("config", "build_delay must be >= 0");
  if (cfg.line_lifetime_years < 1) flag("config", "line_lifetime_years must be >= 1");

  std::set<std::string> zone_ids;
  int onshore_count = 0;
  for (const auto& z : m.zones) {
    if (!detail::valid_identifier(z.id)) flag("zone '" + z.id + "'", "invalid identifier");
    if (!zone_ids.insert(z.id).second) flag("zone '" + z.id + "'", "duplicate id");
    if (z.kind == ZoneKind::Onshore) {
      ++onshore_count;
      if (z.online_epoch) flag("zone '" + z.id + "'", "onshore zone must not set online_epoch");
    } else {
      if (!z.online_epoch)
        flag("zone '" + z.id + "'", "offshore zone requires online_epoch");
      else if (*z.online_epoch < 0 || *z.online_epoch >= cfg.epochs)
        flag("zone '" + z.id + "'", "online_epoch outside planning horizon");
      if (z.region) flag("zone '" + z.id + "'", "region assignment on offshore zone");
    }
    if (z.region) {
      bool found = false;
      for (const auto& p : m.policy_regions) found |= (p.id == *z.region);
      if (!found) flag("zone '" + z.id + "'", "unknown region '" + *z.region + "'");
    }
  }
  if (onshore_count == 0) flag("system", "at least one onshore zone required");

  std::set<std::string> type_ids;
  for (const auto& t : m.line_types) {
    if (!type_ids.insert(t.id).second) flag("line_type '" + t.id + "'", "duplicate id");
    if (!(t.capacity_mw > 0)) flag("line_type '" + t.id + "'", "capacity must be positive");
    // Cost must evaluate non-negative for every length >= 0.
    bool ok = true;
    switch (t.cost_model) {
      case LineCostModel::FixedPerLine: ok = t.c0 >= 0; break;
      case LineCostModel::PerMwMile: ok = t.per_mw_mile >= 0; break;
      case LineCostModel::AffineInLength: ok = t.c0 >= 0 && t.c1 >= 0; break;
      case LineCostModel::QuadraticInLength:
        if (t.c2 < 0)
          ok = false;
        else if (t.c1 >= 0)
          ok = t.c0 >= 0;
        else
          ok = t.c2 > 0 && (t.c0 - t.c1 * t.c1 / (4.0 * t.c2)) >= 0;
        break;
    }
    if (!ok) flag("line_type '" + t.id + "'", "cost can evaluate negative");
  }

  std::set<std::string> line_ids;
  for (const auto& l : m.lines) {
    const std::string ent = "line '" + l.id + "'";
    if (!line_ids.insert(l.id).second) flag(ent, "duplicate id");
    if (!zone_ids.count(l.from_zone)) flag(ent, "unknown zone '" + l.from_zone + "'");
    if (!zone_ids.count(l.to_zone)) flag(ent, "unknown zone '" + l.to_zone + "'");
    if (l.from_zone == l.to_zone) flag(ent, "from_zone equals to_zone");
    if (l.length_miles < 0) flag(ent, "negative length");
    if (l.current == CurrentKind::DC && l.susceptance)
      flag(ent, "dc line carries susceptance");
    if (l.current == CurrentKind::AC && (!l.susceptance || *l.susceptance <= 0))
      flag(ent, "ac line requires positive susceptance");
    if (l.status == LineStatus::Existing) {
      if (!(l.existing_capacity_mw > 0)) flag(ent, "existing line requires positive capacity");
      if (!l.allowed_types.empty()) flag(ent, "existing line must not list candidate types");
      if (l.opoi_only) flag(ent, "opoi_only is only valid on candidates");
    } else {
      if (l.allowed_types.empty()) flag(ent, "candidate line requires allowed_types");
      for (const auto& t : l.allowed_types)
        if (!type_ids.count(t)) flag(ent, "unknown line type '" + t + "'");
      if (l.existing_capacity_mw != 0) flag(ent, "candidate line must not set capacity_mw");
    }
  }

  std::set<std::string> tech_ids;
  for (const auto& t : m.tech_options) {
    const std::string ent = "technology '" + t.id + "'";
    if (!tech_ids.insert(t.id).second) flag(ent, "duplicate id");
    if (t.lifetime_years < 1) flag(ent, "lifetime must be >= 1");
    if (static_cast<int>(t.capex_per_mw.size()) != cfg.epochs ||
        static_cast<int>(t.fixed_om_per_mw_yr.size()) != cfg.epochs ||
        static_cast<int>(t.var_om_per_mwh.size()) != cfg.epochs)
      flag(ent, "cost series length must equal epoch count");
    for (const auto& z : t.buildable_zones)
      if (!zone_ids.count(z)) flag(ent, "unknown buildable zone '" + z + "'");
  }

  std::set<std::string> gen_ids;
  std::set<std::pair<std::string, std::string>> new_pairs;
  for (const auto& g : m.generators) {
    const std::string ent = "generator '" + g.id + "'";
    if (!gen_ids.insert(g.id).second) flag(ent, "duplicate id");
    if (!zone_ids.count(g.zone)) flag(ent, "unknown zone '" + g.zone + "'");
    if (g.p_min_mw < 0 || g.p_min_mw > g.p_max_mw)
      flag(ent, "power limits must satisfy 0 <= p_min <= p_max");
    if (g.ramp_mw_per_hour < 0) flag(ent, "negative ramp rate");
    for (const auto& [k, v] : g.externality_rates)
      if (v < 0) flag(ent, "negative externality rate '" + k + "'");
    if (!g.dispatchable) {
      if (!g.profile) flag(ent, "intermittent generator requires a profile");
      if (g.p_min_mw != 0) flag(ent, "intermittent generator requires p_min = 0");
    }
    if (g.profile && !m.profiles.empty() && !m.profiles.count(*g.profile))
      flag(ent, "unknown profile '" + *g.profile + "'");
    if (g.status == GenStatus::NewCandidate) {
      const TechnologyOption* tech = m.find_tech(g.tech);
      if (!tech) {
        flag(ent, "unknown technology '" + g.tech + "'");
      } else if (!tech->buildable_zones.empty()) {
        bool ok = false;
        for (const auto& z : tech->buildable_zones) ok |= (z == g.zone);
        if (!ok) flag(ent, "zone not buildable for technology '" + g.tech + "'");
      }
      if (!new_pairs.insert({g.zone, g.tech}).second)
        flag(ent, "duplicate new-capacity candidate for zone/technology");
      if (g.p_max_mw != 0) flag(ent, "new candidate must not set p_max (capacity is decided)");
    }
  }

  if (m.storage) {
    const auto& s = *m.storage;
    if (!(s.eta_charge > 0 && s.eta_charge <= 1))
      flag("storage", "eta_charge out of range (0,1]");
    if (!(s.eta_discharge > 0 && s.eta_discharge <= 1))
      flag("storage", "eta_discharge out of range (0,1]");
    if (!(s.dod >= 0 && s.dod < 1)) flag("storage", "dod out of range [0,1)");
    if (!(s.degradation >= 0 && s.degradation < 1))
      flag("storage", "degradation out of range [0,1)");
    if (!(s.duration_hours > 0)) flag("storage", "duration_hours must be positive");
    if (s.lifetime_years < 1) flag("storage", "lifetime must be >= 1");
    if (!(s.soc_init >= s.dod && s.soc_init <= 1))
      flag("storage", "soc_init outside [dod, 1]");
    if (static_cast<int>(s.power_capex_per_mw.size()) != cfg.epochs ||
        static_cast<int>(s.energy_capex_per_mwh.size()) != cfg.epochs ||
        static_cast<int>(s.fixed_om_per_mw_yr.size()) != cfg.epochs)
      flag("storage", "cost series length must equal epoch count");
  }

  if (!m.demand_blocks.empty()) {
    double total = 0.0;
    for (const auto& b : m.demand_blocks) {
      if (b.willingness_to_pay < 0)
        flag("demand_block '" + b.id + "'", "willingness_to_pay must be >= 0");
      if (b.share < 0) flag("demand_block '" + b.id + "'", "negative share");
      total += b.share;
    }
    if (std::abs(total - 1.0) > 1e-9) flag("demand_blocks", "shares must sum to 1");
  }

  for (const auto& p : m.policy_regions) {
    if (!(p.rps_target >= 0 && p.rps_target <= 1))
      flag("policy_region '" + p.id + "'", "rps_target out of range [0,1]");
    if (p.enforcement == RpsEnforcement::Soft && p.penalty_per_mwh < 0)
      flag("policy_region '" + p.id + "'", "negative penalty");
  }

  // Offshore zones must be able to reach the onshore grid over some line.
  {
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& l : m.lines) {
      adj[l.from_zone].push_back(l.to_zone);
      adj[l.to_zone].push_back(l.from_zone);
    }
    for (const auto& z : m.zones) {
      if (z.kind != ZoneKind::Offshore) continue;
      std::set<std::string> seen{z.id};
      std::queue<std::string> q;
      q.push(z.id);
      bool reached = false;
      while (!q.empty() && !reached) {
        auto cur = q.front();
        q.pop();
        for (const auto& nxt : adj[cur]) {
          if (seen.count(nxt)) continue;
          seen.insert(nxt);
          const Zone* nz = m.find_zone(nxt);
          if (nz && nz->kind == ZoneKind::Onshore) {
            reached = true;
            break;
          }
          q.push(nxt);
        }
      }
      if (!reached) flag("zone '" + z.id + "'", "offshore unreachable");
    }
  }

  // The big-M disjunction must dominate every candidate AC mismatch term.
  if (cfg.big_m) {
    double need = 0.0;
    for (const auto& l : m.lines)
      if (l.status == LineStatus::Candidate && l.current == CurrentKind::AC && l.susceptance)
        need = std::max(need, *l.susceptance * 2.0 * M_PI);
    if (*cfg.big_m <= need) flag("config", "big_m must exceed max candidate susceptance * 2*pi");
  }

  auto check_table = [&](const HourlyTable& t, const std::string& ent, bool is_cf) {
    std::set<std::string> cols(t.zones.begin(), t.zones.end());
    if (cols.size() != t.zones.size()) flag(ent, "duplicate zone column");
    if (cols != zone_ids) flag(ent, "columns must cover exactly the model zones");
    if (t.hours() != cfg.tau * 24) flag(ent, "expected tau*24 rows");
    for (double v : t.values) {
      if (!std::isfinite(v)) {
        flag(ent, "non-finite value");
        break;
      }
      if (v < 0 || (is_cf && v > 1.0)) {
        flag(ent, is_cf ? "capacity factor outside [0,1]" : "negative value");
        break;
      }
    }
  };
  if (m.demand) check_table(*m.demand, "time_series demand", false);
  for (const auto& [id, t] : m.profiles) check_table(t, "profile '" + id + "'", true);

  return out;
}

// ---------------------------------------------------------------------------
// File-level load/save

inline SystemModel load_system(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open system file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  SystemModel m = system_from_json(j, path.parent_path());
  auto violations = validate_system(m);
  if (!violations.empty()) {
    std::string msg = path.string() + ": invalid system:";
    for (const auto& v : violations) msg += "\n  " + v.entity + ": " + v.rule;
    throw ModelError(msg);
  }
  return m;
}

// Writes the system JSON plus CSV side files for any loaded time series.
inline void save_system(const SystemModel& m, const std::filesystem::path& path) {
  std::map<std::string, std::string> series_files;
  const std::string stem = path.stem().string();
  if (m.demand) series_files["demand"] = stem + "_demand.csv";
  for (const auto& [id, t] : m.profiles) series_files[id] = stem + "_profile_" + id + ".csv";

  json j = system_to_json(m, series_files);
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';

  const auto dir = path.parent_path();
  if (m.demand) write_hourly_csv(*m.demand, dir / series_files["demand"]);
  for (const auto& [id, t] : m.profiles) write_hourly_csv(t, dir / series_files.at(id));
}

// Canonical content digest used to pair runs with the system they came from.
inline std::uint64_t system_fingerprint(const SystemModel& m) {
  std::string repr = system_to_json(m).dump();
  char buf[32];
  if (m.demand)
    for (double v : m.demand->values) {
      std::snprintf(buf, sizeof buf, "%.17g,", v);
      repr += buf;
    }
  for (const auto& [id, t] : m.profiles) {
    repr += id;
    for (double v : t.values) {
      std::snprintf(buf, sizeof buf, "%.17g,", v);
      repr += buf;
    }
  }
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : repr) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace gridplan
