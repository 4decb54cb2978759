#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridplan/common.hpp"
#include "gridplan/model.hpp"

namespace gridplan {

// Capital recovery factor r(1+r)^n / ((1+r)^n - 1).
inline double crf(double r, int n) {
  if (r <= 0.0) throw std::invalid_argument("crf: discount rate must be positive");
  if (n < 1) throw std::invalid_argument("crf: lifetime must be at least one year");
  const double g = std::pow(1.0 + r, n);
  return r * g / (g - 1.0);
}

// Discount weight of an asset in its n-th year of life (n = 1 means the build
// year itself): 1/(1+r)^(n-1) while alive, 0 past the useful life.
inline double discount_factor(int n, int lifetime, double r) {
  if (n < 1) throw std::invalid_argument("discount_factor: year offset starts at 1");
  if (n > lifetime) return 0.0;
  return std::pow(1.0 + r, -(n - 1));
}

// Planning horizon split into equal-length epochs. Investments land at an
// epoch's first year; operating flows repeat for every year of the epoch.
struct EpochStructure {
  int count = 1;
  int years_per_epoch = 1;

  int total_years() const { return count * years_per_epoch; }
  // 1-based calendar year of epoch e's first year (e is 0-based).
  int first_year(int e) const { return e * years_per_epoch + 1; }

  // Sum of calendar discount factors 1/(1+r)^(y-1) over epoch e's years.
  double operating_discount_sum(int e, double r) const {
    double s = 0.0;
    for (int w = 0; w < years_per_epoch; ++w)
      s += std::pow(1.0 + r, -(first_year(e) + w - 1));
    return s;
  }

  // Discounted annuity-year count for a build at epoch `built`: counts every
  // horizon year the asset is alive, discounted by asset age. Multiplying by
  // CRF and the unit cost gives the asset's total discounted carrying cost.
  double investment_annuity(int built, int lifetime, double r) const {
    double s = 0.0;
    for (int t = first_year(built); t <= total_years(); ++t)
      s += discount_factor(t - first_year(built) + 1, lifetime, r);
    return s;
  }
};

inline EpochStructure epoch_structure(const PlanningConfig& cfg) {
  return EpochStructure{cfg.epochs, cfg.years_per_epoch};
}

// Discounted annual investment cost aggregated per epoch. builds[n] is the
// capacity added at epoch n, priced at unit_cost[n]; each build pays
// CRF * cost every year it remains within its useful life, discounted by
// asset age, and the per-year charges are summed over each epoch.
inline std::vector<double> annualized_investment(const std::vector<double>& builds,
                                                 const std::vector<double>& unit_cost,
                                                 int lifetime, double r,
                                                 const EpochStructure& es) {
  if (builds.size() != static_cast<size_t>(es.count) ||
      unit_cost.size() != static_cast<size_t>(es.count))
    throw std::invalid_argument("annualized_investment: series length != epoch count");
  const double recovery = crf(r, lifetime);
  std::vector<double> ic(es.count, 0.0);
  for (int y = 0; y < es.count; ++y) {
    double total = 0.0;
    for (int n = 0; n <= y; ++n) {
      if (builds[n] == 0.0) continue;
      double weight = 0.0;
      for (int w = 0; w < es.years_per_epoch; ++w) {
        const int age = es.first_year(y) + w - es.first_year(n) + 1;
        weight += discount_factor(age, lifetime, r);
      }
      total += weight * unit_cost[n] * builds[n];
    }
    ic[y] = recovery * total;
  }
  return ic;
}

// Capital cost in $ of building one line of the given type over a route.
inline double line_capital_cost(const LineType& type, double length_miles) {
  switch (type.cost_model) {
    case LineCostModel::FixedPerLine:
      return type.c0 * 1e6;
    case LineCostModel::PerMwMile:
      return type.per_mw_mile * type.capacity_mw * length_miles;
    case LineCostModel::AffineInLength:
      return (type.c1 * length_miles + type.c0) * 1e6;
    case LineCostModel::QuadraticInLength:
      return (type.c2 * length_miles * length_miles + type.c1 * length_miles + type.c0) * 1e6;
  }
  throw std::logic_error("line_capital_cost: unhandled cost model");
}

// The three standard export-cable options, costs in million $ per route mile.
inline std::vector<LineType> standard_cable_types() {
  std::vector<LineType> out(3);
  out[0] = {"hvac-400", 400.0, LineCostModel::QuadraticInLength, 40.13, 1.5093, 0.0229, 0.0};
  out[1] = {"hvdc-1400", 1400.0, LineCostModel::AffineInLength, 448.58, 2.6763, 0.0, 0.0};
  out[2] = {"hvdc-2200", 2200.0, LineCostModel::AffineInLength, 687.44, 3.5421, 0.0, 0.0};
  return out;
}

// Cost in million $ of one standard cable type over the given length.
inline double offshore_cable_cost(double length_miles, const std::string& type_id) {
  if (length_miles < 0.0)
    throw std::invalid_argument("offshore_cable_cost: negative length");
  for (const auto& t : standard_cable_types())
    if (t.id == type_id) return line_capital_cost(t, length_miles) / 1e6;
  throw std::invalid_argument("offshore_cable_cost: unknown cable type " + type_id);
}

// Onshore reinforcement cost in $: capacity times route length times rate.
inline double onshore_line_cost(double capacity_mw, double length_miles,
                                double rate_per_mw_mile) {
  return capacity_mw * length_miles * rate_per_mw_mile;
}

// Per-epoch discounted cost report plus undiscounted physical totals.
struct CostBreakdown {
  int epochs = 0;
  std::vector<double> ic_generation;    // $
  std::vector<double> ic_transmission;  // $
  std::vector<double> ic_storage;       // $
  std::vector<double> oc;               // $
  std::vector<double> ec;               // $ (unweighted)
  std::map<std::string, double> mwh_by_tech;
  double co2_tons = 0.0;
  std::map<std::string, double> air_quality_usd_by_zone;

  double total_hard_cost() const {
    double s = 0.0;
    for (int e = 0; e < epochs; ++e)
      s += ic_generation[e] + ic_transmission[e] + ic_storage[e] + oc[e];
    return s;
  }
  double total_externality_cost() const {
    double s = 0.0;
    for (int e = 0; e < epochs; ++e) s += ec[e];
    return s;
  }
  // Objective value implied by the breakdown at weight w on externalities.
  double objective(double w) const { return total_hard_cost() + w * total_externality_cost(); }
};

}  // namespace gridplan
