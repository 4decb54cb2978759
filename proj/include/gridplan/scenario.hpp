#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridplan/common.hpp"
#include "gridplan/model.hpp"

namespace gridplan {

// One source-year day flattened to a 24*|zones| vector of normalized net load.
struct DailyVector {
  int day_index = 1;  // 1-based calendar day within the source year
  std::vector<double> values;
};

struct ScenarioDay {
  enum class Kind { Normal, Extreme };
  std::string id;
  Kind kind = Kind::Normal;
  double weight = 1.0;  // days per year
  int source_day = 1;   // 1-based day the rows were copied from
  HourlyTable load;     // MW, hours_per_day x zones
  std::map<std::string, HourlyTable> profiles;  // capacity factors
};

struct ScenarioSet {
  int k = 0;
  std::uint64_t seed = 0;
  bool extremes = false;
  int hours_per_day = 24;
  std::vector<std::string> zones;
  std::vector<std::vector<ScenarioDay>> epochs;
};

// ---------------------------------------------------------------------------
// Net load

// Slices two aligned zone-hour series into per-day vectors of
// (load - renewables), normalized by the year's largest absolute entry.
inline std::vector<DailyVector> compute_net_load(const HourlyTable& load,
                                                 const HourlyTable& renewables) {
  if (load.zones != renewables.zones)
    throw ModelError("compute_net_load: series cover different zones");
  if (load.hours() != renewables.hours())
    throw ModelError("compute_net_load: series cover different hours");
  if (load.hours() % 24 != 0)
    throw ModelError("compute_net_load: series length must be whole days");
  const int days = load.hours() / 24;
  const int nz = static_cast<int>(load.zones.size());

  double max_abs = 0.0;
  for (size_t i = 0; i < load.values.size(); ++i) {
    const double v = load.values[i] - renewables.values[i];
    if (!std::isfinite(v)) throw ModelError("compute_net_load: non-finite input");
    max_abs = std::max(max_abs, std::abs(v));
  }
  const double scale = max_abs > 0 ? 1.0 / max_abs : 0.0;

  std::vector<DailyVector> out(days);
  for (int d = 0; d < days; ++d) {
    out[d].day_index = d + 1;
    out[d].values.resize(24 * nz);
    for (int h = 0; h < 24; ++h)
      for (int z = 0; z < nz; ++z)
        out[d].values[h * nz + z] =
            (load.at(d * 24 + h, z) - renewables.at(d * 24 + h, z)) * scale;
  }
  return out;
}

// Aggregate MW output of existing onshore intermittent units, per zone-hour.
inline HourlyTable onshore_renewable_output(const SystemModel& m) {
  if (!m.demand) throw ModelError("onshore_renewable_output: model has no demand series");
  HourlyTable out;
  out.zones = m.demand->zones;
  out.values.assign(m.demand->values.size(), 0.0);
  for (const auto& g : m.generators) {
    if (g.dispatchable || g.status != GenStatus::Existing || !g.profile) continue;
    const Zone* z = m.find_zone(g.zone);
    if (!z || z->kind != ZoneKind::Onshore) continue;
    auto it = m.profiles.find(*g.profile);
    if (it == m.profiles.end())
      throw ModelError("onshore_renewable_output: missing profile '" + *g.profile + "'");
    const HourlyTable& cf = it->second;
    int col = -1;
    for (size_t c = 0; c < out.zones.size(); ++c)
      if (out.zones[c] == g.zone) col = static_cast<int>(c);
    int cf_col = -1;
    for (size_t c = 0; c < cf.zones.size(); ++c)
      if (cf.zones[c] == g.zone) cf_col = static_cast<int>(c);
    if (col < 0 || cf_col < 0) continue;
    for (int h = 0; h < out.hours(); ++h)
      out.at(h, col) += g.p_max_mw * cf.at(h, cf_col);
  }
  return out;
}

// ---------------------------------------------------------------------------
// k-means (Lloyd iterations, k-means++ seeding, deterministic for fixed seed)

struct KmeansResult {
  std::vector<int> assignment;
  std::vector<std::vector<double>> centroids;
};

namespace detail {

inline double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// Uniform double in [0,1) derived from the raw generator; avoids the
// implementation-defined std distributions so runs agree across platforms.
inline double u01(std::uint64_t& state) {
  // splitmix64
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  z ^= z >> 31;
  return (z >> 11) * 0x1.0p-53;
}

}  // namespace detail

inline KmeansResult kmeans(const std::vector<DailyVector>& vectors, int k,
                           std::uint64_t seed) {
  const int n = static_cast<int>(vectors.size());
  if (n == 0) throw ModelError("kmeans: no vectors");
  // Distinct-vector count bounds k.
  {
    std::vector<const std::vector<double>*> sorted;
    sorted.reserve(n);
    for (const auto& v : vectors) sorted.push_back(&v.values);
    std::sort(sorted.begin(), sorted.end(),
              [](const auto* a, const auto* b) { return *a < *b; });
    int distinct = 1;
    for (int i = 1; i < n; ++i)
      if (*sorted[i] != *sorted[i - 1]) ++distinct;
    if (k < 1 || k > distinct)
      throw ModelError("kmeans: k must be between 1 and the number of distinct vectors");
  }

  std::uint64_t state = seed;
  std::vector<std::vector<double>> centroids;
  centroids.reserve(k);

  // k-means++ seeding.
  centroids.push_back(vectors[static_cast<int>(detail::u01(state) * n)].values);
  std::vector<double> d2(n);
  while (static_cast<int>(centroids.size()) < k) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      double best = kInf;
      for (const auto& c : centroids) best = std::min(best, detail::sq_dist(vectors[i].values, c));
      d2[i] = best;
      total += best;
    }
    int pick = -1;
    if (total > 0) {
      const double target = detail::u01(state) * total;
      double cum = 0.0;
      for (int i = 0; i < n; ++i) {
        cum += d2[i];
        if (cum >= target) {
          pick = i;
          break;
        }
      }
      if (pick < 0) pick = n - 1;
    } else {
      // All points coincide with chosen centers; take the first unused one.
      for (int i = 0; i < n && pick < 0; ++i)
        if (d2[i] > 0 || true) {
          bool used = false;
          for (const auto& c : centroids) used |= (c == vectors[i].values);
          if (!used) pick = i;
        }
      if (pick < 0) pick = 0;
    }
    centroids.push_back(vectors[pick].values);
  }

  std::vector<int> assign(n, -1);
  for (int iter = 0; iter < 1000; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = detail::sq_dist(vectors[i].values, centroids[0]);
      for (int c = 1; c < k; ++c) {
        const double d = detail::sq_dist(vectors[i].values, centroids[c]);
        if (d < best_d - 0.0) {
          best_d = d;
          best = c;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    // Re-seat any empty cluster on the point farthest from its centroid.
    std::vector<int> count(k, 0);
    for (int i = 0; i < n; ++i) ++count[assign[i]];
    for (int c = 0; c < k; ++c) {
      if (count[c] > 0) continue;
      int worst = -1;
      double worst_d = -1.0;
      for (int i = 0; i < n; ++i) {
        if (count[assign[i]] <= 1) continue;
        const double d = detail::sq_dist(vectors[i].values, centroids[assign[i]]);
        if (d > worst_d) {
          worst_d = d;
          worst = i;
        }
      }
      if (worst < 0) throw SolverError("kmeans: cannot repopulate empty cluster");
      --count[assign[worst]];
      assign[worst] = c;
      ++count[c];
      changed = true;
    }
    // Recompute centroids.
    const size_t dim = vectors[0].values.size();
    std::vector<std::vector<double>> next(k, std::vector<double>(dim, 0.0));
    for (int i = 0; i < n; ++i)
      for (size_t d = 0; d < dim; ++d) next[assign[i]][d] += vectors[i].values[d];
    for (int c = 0; c < k; ++c)
      for (size_t d = 0; d < dim; ++d) next[c][d] /= count[c];
    centroids.swap(next);
    if (!changed) break;
  }
  return {assign, centroids};
}

// ---------------------------------------------------------------------------
// Representative-day selection

struct DaySelection {
  int cluster = 0;
  int normal_day = -1;   // 1-based source day, -1 when the cluster collapses
  double normal_weight = 0.0;
  int extreme_day = -1;  // 1-based source day, -1 when extremes are disabled
};

// For each cluster: the member closest to the centroid becomes the normal day
// (weight = cluster size, minus one when an extreme day is split off) and the
// farthest member becomes the one-day extreme. Ties go to the earliest day.
inline std::vector<DaySelection> select_representative_days(
    const KmeansResult& km, const std::vector<DailyVector>& vectors, bool extremes) {
  const int k = static_cast<int>(km.centroids.size());
  const int n = static_cast<int>(vectors.size());
  if (n == 0) throw ModelError("select_representative_days: empty input");
  std::vector<DaySelection> out;
  for (int c = 0; c < k; ++c) {
    DaySelection sel;
    sel.cluster = c;
    int size = 0;
    double best = kInf, worst = -1.0;
    int best_day = -1, worst_day = -1;
    for (int i = 0; i < n; ++i) {
      if (km.assignment[i] != c) continue;
      ++size;
      const double d = detail::sq_dist(vectors[i].values, km.centroids[c]);
      if (d < best || (d == best && vectors[i].day_index < best_day)) {
        best = d;
        best_day = vectors[i].day_index;
      }
      if (d > worst || (d == worst && vectors[i].day_index < worst_day)) {
        worst = d;
        worst_day = vectors[i].day_index;
      }
    }
    if (size == 0) throw ModelError("select_representative_days: empty cluster");
    if (extremes) {
      sel.extreme_day = worst_day;
      if (size > 1) {
        sel.normal_day = best_day;
        sel.normal_weight = size - 1;
      }
    } else {
      sel.normal_day = best_day;
      sel.normal_weight = size;
    }
    out.push_back(sel);
  }
  return out;
}

namespace detail {

inline HourlyTable copy_day(const HourlyTable& src, int day_1based, double scale) {
  HourlyTable out;
  out.zones = src.zones;
  const int nz = static_cast<int>(src.zones.size());
  out.values.resize(24 * nz);
  for (int h = 0; h < 24; ++h)
    for (int z = 0; z < nz; ++z) out.at(h, z) = src.at((day_1based - 1) * 24 + h, z) * scale;
  return out;
}

}  // namespace detail

// Builds one clustered scenario per epoch. The source year is scaled by
// compound load growth to the epoch's final year, clustered on net load, and
// the selected days' rows are copied verbatim (no centroid averaging).
inline ScenarioSet build_scenarios(const SystemModel& m, int k, bool extremes,
                                   std::uint64_t seed) {
  if (!m.demand) throw ModelError("build_scenarios: model has no demand series");
  ScenarioSet set;
  set.k = k;
  set.seed = seed;
  set.extremes = extremes;
  set.hours_per_day = 24;
  set.zones = m.demand->zones;

  const HourlyTable renewables = onshore_renewable_output(m);
  for (int e = 0; e < m.config.epochs; ++e) {
    const double growth =
        std::pow(1.0 + m.config.load_growth, (e + 1) * m.config.years_per_epoch);
    HourlyTable scaled = *m.demand;
    for (double& v : scaled.values) v *= growth;

    auto vectors = compute_net_load(scaled, renewables);
    auto km = kmeans(vectors, k, seed + static_cast<std::uint64_t>(e));
    auto selections = select_representative_days(km, vectors, extremes);

    std::vector<ScenarioDay> days;
    for (const auto& sel : selections) {
      auto make_day = [&](int src, double weight, ScenarioDay::Kind kind,
                          const std::string& id) {
        ScenarioDay d;
        d.id = id;
        d.kind = kind;
        d.weight = weight;
        d.source_day = src;
        d.load = detail::copy_day(scaled, src, 1.0);
        for (const auto& [pid, table] : m.profiles)
          d.profiles[pid] = detail::copy_day(table, src, 1.0);
        days.push_back(std::move(d));
      };
      const std::string tag = "y" + std::to_string(e + 1) + "c" + std::to_string(sel.cluster);
      if (sel.normal_day > 0)
        make_day(sel.normal_day, sel.normal_weight, ScenarioDay::Kind::Normal, tag + "n");
      if (sel.extreme_day > 0)
        make_day(sel.extreme_day, 1.0, ScenarioDay::Kind::Extreme, tag + "x");
    }
    set.epochs.push_back(std::move(days));
  }
  return set;
}

// ---------------------------------------------------------------------------
// Scenario-set checks and file format

inline std::vector<std::string> check_scenarios(const ScenarioSet& set, int tau) {
  std::vector<std::string> problems;
  if (set.epochs.empty()) problems.push_back("scenario set has no epochs");
  for (size_t e = 0; e < set.epochs.size(); ++e) {
    double total = 0.0;
    for (const auto& d : set.epochs[e]) {
      total += d.weight;
      const std::string ent = "day '" + d.id + "'";
      if (d.kind == ScenarioDay::Kind::Normal && d.weight < 1.0)
        problems.push_back(ent + ": normal day weight below 1");
      if (d.kind == ScenarioDay::Kind::Extreme && d.weight != 1.0)
        problems.push_back(ent + ": extreme day weight must be 1");
      if (d.load.zones != set.zones) problems.push_back(ent + ": load zones mismatch");
      if (d.load.hours() != set.hours_per_day)
        problems.push_back(ent + ": load hour count mismatch");
      for (double v : d.load.values)
        if (!std::isfinite(v) || v < 0) {
          problems.push_back(ent + ": bad load value");
          break;
        }
      for (const auto& [pid, table] : d.profiles) {
        if (table.zones != set.zones)
          problems.push_back(ent + ": profile '" + pid + "' zones mismatch");
        if (table.hours() != set.hours_per_day)
          problems.push_back(ent + ": profile '" + pid + "' hour count mismatch");
        for (double v : table.values)
          if (!(v >= 0.0 && v <= 1.0)) {
            problems.push_back(ent + ": profile '" + pid + "' outside [0,1]");
            break;
          }
      }
    }
    if (std::abs(total - tau) > 1e-6)
      problems.push_back("epoch " + std::to_string(e + 1) + ": weights sum to " +
                         std::to_string(total) + ", expected tau");
  }
  return problems;
}

inline nlohmann::json scenarios_to_json(const ScenarioSet& set) {
  nlohmann::json j;
  j["k"] = set.k;
  j["seed"] = set.seed;
  j["extremes"] = set.extremes;
  j["hours_per_day"] = set.hours_per_day;
  j["zones"] = set.zones;
  j["epochs"] = nlohmann::json::array();
  for (const auto& days : set.epochs) {
    nlohmann::json ej;
    ej["days"] = nlohmann::json::array();
    for (const auto& d : days) {
      nlohmann::json dj;
      dj["id"] = d.id;
      dj["kind"] = d.kind == ScenarioDay::Kind::Normal ? "normal" : "extreme";
      dj["weight"] = d.weight;
      dj["source_day"] = d.source_day;
      auto rows = [&](const HourlyTable& t) {
        nlohmann::json r = nlohmann::json::array();
        for (int h = 0; h < t.hours(); ++h) {
          nlohmann::json row = nlohmann::json::array();
          for (size_t z = 0; z < t.zones.size(); ++z) row.push_back(t.at(h, static_cast<int>(z)));
          r.push_back(row);
        }
        return r;
      };
      dj["load"] = rows(d.load);
      dj["profiles"] = nlohmann::json::object();
      for (const auto& [pid, table] : d.profiles) dj["profiles"][pid] = rows(table);
      ej["days"].push_back(dj);
    }
    j["epochs"].push_back(ej);
  }
  return j;
}

inline ScenarioSet scenarios_from_json(const nlohmann::json& j) {
  ScenarioSet set;
  set.k = j.value("k", 0);
  set.seed = j.value("seed", std::uint64_t{0});
  set.extremes = j.value("extremes", false);
  set.hours_per_day = j.value("hours_per_day", 24);
  set.zones = j.at("zones").get<std::vector<std::string>>();
  auto parse_rows = [&](const nlohmann::json& r) {
    HourlyTable t;
    t.zones = set.zones;
    for (const auto& row : r) {
      if (row.size() != set.zones.size())
        throw ParseError("scenario day row width does not match zones");
      for (const auto& v : row) t.values.push_back(v.get<double>());
    }
    return t;
  };
  for (const auto& ej : j.at("epochs")) {
    std::vector<ScenarioDay> days;
    for (const auto& dj : ej.at("days")) {
      ScenarioDay d;
      d.id = dj.value("id", "");
      const std::string kind = dj.value("kind", "normal");
      if (kind != "normal" && kind != "extreme")
        throw ParseError("scenario day '" + d.id + "': unknown kind '" + kind + "'");
      d.kind = kind == "normal" ? ScenarioDay::Kind::Normal : ScenarioDay::Kind::Extreme;
      d.weight = dj.at("weight").get<double>();
      d.source_day = dj.value("source_day", 1);
      d.load = parse_rows(dj.at("load"));
      if (dj.contains("profiles"))
        for (auto it = dj["profiles"].begin(); it != dj["profiles"].end(); ++it)
          d.profiles[it.key()] = parse_rows(it.value());
      days.push_back(std::move(d));
    }
    set.epochs.push_back(std::move(days));
  }
  return set;
}

inline void save_scenarios(const ScenarioSet& set, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << scenarios_to_json(set).dump(1) << '\n';
}

inline ScenarioSet load_scenarios(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file " + path.string());
  try {
    return scenarios_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace gridplan
