#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <optional>
#include <queue>
#include <vector>

#include "gridplan/common.hpp"
#include "gridplan/milp.hpp"
#include "gridplan/simplex.hpp"

namespace gridplan {

struct SolveLimits {
  double gap = 1e-4;                       // relative incumbent/bound gap target
  long node_limit = 500000;
  std::optional<double> time_limit_sec;    // wall clock; only affects stopping
};

// Best-bound branch and bound over the binary variables. Nodes carry bound
// overrides only; every LP shares the static problem data. Branching picks the
// most fractional binary (lowest index on ties), dives on the child nearest
// the LP value, and parks the sibling in a bound-ordered pool.
class BranchAndBound {
 public:
  explicit BranchAndBound(const MilpInstance& inst)
      : inst_(inst), base_(LpProblem::from_instance(inst)) {
    for (size_t j = 0; j < inst.vars.size(); ++j)
      if (inst.vars[j].kind == VarKind::Binary) binaries_.push_back(static_cast<int>(j));
  }

  PlanSolution solve(const SolveLimits& limits) {
    const auto t0 = std::chrono::steady_clock::now();
    auto out_of_time = [&] {
      if (!limits.time_limit_sec) return false;
      return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() >
             *limits.time_limit_sec;
    };

    PlanSolution sol;
    struct Node {
      double bound;
      long seq;
      std::map<int, double> fixed;  // binary index -> 0.0 or 1.0
    };
    auto cmp = [](const Node& a, const Node& b) {
      return a.bound > b.bound || (a.bound == b.bound && a.seq > b.seq);
    };
    std::priority_queue<Node, std::vector<Node>, decltype(cmp)> pool(cmp);
    pool.push({-kInf, 0, {}});
    long seq = 1;

    double incumbent = kInf;
    std::vector<double> best_x;
    long lp_iters = 0;
    long nodes = 0;
    bool hit_limit = false;

    std::vector<double> lo = base_.lo, hi = base_.hi;
    while (!pool.empty() && !hit_limit) {
      Node node = pool.top();
      // Every open node is within the gap of the incumbent: done.
      if (node.bound > cutoff(incumbent, limits.gap)) break;
      pool.pop();
      if (std::isfinite(node.bound)) sol.bound_history.push_back(node.bound);

      // Depth-first plunge from the selected node.
      std::map<int, double> fixed = std::move(node.fixed);
      double parent_bound = node.bound;
      while (true) {
        if (nodes >= limits.node_limit || out_of_time()) {
          // Return the unexplored path so the bound stays honest.
          pool.push({parent_bound, seq++, std::move(fixed)});
          hit_limit = true;
          break;
        }
        ++nodes;
        apply_bounds(fixed, lo, hi);
        LpResult lp = solve_lp(base_, lo, hi);
        lp_iters += lp.iterations;
        if (lp.status == SolveStatus::Unbounded)
          throw SolverError("relaxation is unbounded; the model is missing bounds");
        if (lp.status != SolveStatus::Optimal) break;  // infeasible leaf
        const double bound = std::max(lp.objective, parent_bound);
        if (bound > cutoff(incumbent, limits.gap)) break;

        const int frac = most_fractional(lp.x);
        if (frac < 0) {
          if (lp.objective < incumbent) {
            incumbent = lp.objective;
            best_x = lp.x;
          }
          break;
        }
        // Sibling keeps the far side; the plunge continues on the near side.
        const double v = lp.x[frac];
        const double near = v >= 0.5 ? 1.0 : 0.0;
        auto sibling = fixed;
        sibling[frac] = 1.0 - near;
        pool.push({bound, seq++, std::move(sibling)});
        fixed[frac] = near;
        parent_bound = bound;
      }
    }

    sol.nodes = nodes;
    sol.lp_iterations = lp_iters;
    if (best_x.empty()) {
      if (hit_limit)
        throw SolverError("limits hit before any feasible solution was found");
      sol.status = SolveStatus::Infeasible;
      return sol;
    }
    const double bound =
        pool.empty() ? incumbent : std::min(incumbent, pool.top().bound);
    sol.values = best_x;
    sol.objective = incumbent;
    sol.best_bound = bound;
    sol.gap = (sol.objective - sol.best_bound) / std::max(1.0, std::abs(sol.objective));
    if (sol.gap < 0) sol.gap = 0;
    if (pool.empty() || sol.gap <= 1e-12)
      sol.status = SolveStatus::Optimal;
    else
      sol.status = sol.gap <= limits.gap ? SolveStatus::GapFeasible : SolveStatus::LimitHit;
    round_binaries(sol.values);
    return sol;
  }

 private:
  static double cutoff(double incumbent, double gap) {
    if (!std::isfinite(incumbent)) return kInf;
    return incumbent - gap * std::max(1.0, std::abs(incumbent));
  }

  void apply_bounds(const std::map<int, double>& fixed, std::vector<double>& lo,
                    std::vector<double>& hi) const {
    lo = base_.lo;
    hi = base_.hi;
    for (const auto& [j, v] : fixed) lo[j] = hi[j] = v;
  }

  int most_fractional(const std::vector<double>& x) const {
    int best = -1;
    double best_frac = kIntTol;
    for (int j : binaries_) {
      const double f = std::abs(x[j] - std::round(x[j]));
      if (f > best_frac + 1e-12) {
        best_frac = f;
        best = j;
      }
    }
    return best;
  }

  void round_binaries(std::vector<double>& x) const {
    for (int j : binaries_)
      if (std::abs(x[j] - std::round(x[j])) <= kIntTol) x[j] = std::round(x[j]);
  }

  const MilpInstance& inst_;
  LpProblem base_;
  std::vector<int> binaries_;
};

inline PlanSolution solve_milp(const MilpInstance& inst, const SolveLimits& limits = {}) {
  if (limits.gap < 0) throw ModelError("mip gap must be non-negative");
  BranchAndBound bnb(inst);
  return bnb.solve(limits);
}

}  // namespace gridplan
