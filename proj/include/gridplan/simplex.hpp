#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "gridplan/common.hpp"
#include "gridplan/milp.hpp"

namespace gridplan {

// LP in computational form: min c'v s.t. [A I] v = b, lo <= v <= hi, where
// v stacks the structural columns and one logical column per row. Built once
// from a MilpInstance and shared across branch-and-bound nodes.
struct LpProblem {
  int rows = 0;
  int structurals = 0;  // logical j lives at index structurals + row
  // Structural columns, CSC.
  std::vector<int> col_start;  // size structurals + 1
  std::vector<int> row_index;
  std::vector<double> value;
  std::vector<double> rhs;       // per row
  std::vector<double> cost;      // per column (structurals + logicals)
  std::vector<double> lo, hi;    // per column
  double objective_offset = 0.0;

  int total() const { return structurals + rows; }

  static LpProblem from_instance(const MilpInstance& inst) {
    LpProblem p;
    p.rows = static_cast<int>(inst.rows.size());
    p.structurals = static_cast<int>(inst.vars.size());
    p.objective_offset = inst.objective_offset;
    p.rhs.resize(p.rows);
    p.cost = inst.objective;
    p.cost.resize(p.total(), 0.0);
    for (const auto& v : inst.vars) {
      p.lo.push_back(v.lo);
      p.hi.push_back(v.hi);
    }
    // Logical bounds encode the row sense.
    for (int r = 0; r < p.rows; ++r) {
      const Row& row = inst.rows[r];
      p.rhs[r] = row.rhs;
      switch (row.sense) {
        case 'L': p.lo.push_back(0.0); p.hi.push_back(kInf); break;
        case 'G': p.lo.push_back(-kInf); p.hi.push_back(0.0); break;
        case 'E': p.lo.push_back(0.0); p.hi.push_back(0.0); break;
        default: throw ModelError("bad row sense");
      }
    }
    // Column-wise triplets with duplicate coefficients accumulated.
    std::vector<std::vector<std::pair<int, double>>> cols(p.structurals);
    for (int r = 0; r < p.rows; ++r)
      for (const auto& [j, a] : inst.rows[r].coeffs) {
        if (!std::isfinite(a)) throw ModelError("non-finite coefficient");
        if (a != 0.0) cols[j].push_back({r, a});
      }
    p.col_start.push_back(0);
    for (int j = 0; j < p.structurals; ++j) {
      auto& c = cols[j];
      std::sort(c.begin(), c.end());
      int last_row = -1;
      for (const auto& [r, a] : c) {
        if (r == last_row) {
          p.value.back() += a;
        } else {
          p.row_index.push_back(r);
          p.value.push_back(a);
          last_row = r;
        }
      }
      p.col_start.push_back(static_cast<int>(p.row_index.size()));
    }
    return p;
  }
};

struct LpResult {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<double> x;              // structurals only
  double objective = 0.0;             // includes the instance offset
  std::vector<double> duals;          // per row
  std::vector<double> reduced_costs;  // per structural column
  long iterations = 0;
};

// Bounded-variable primal simplex. Phase 1 drives the summed bound violation
// of the basic variables to zero, phase 2 optimizes the true cost; both share
// the pricing/ratio machinery. Dantzig pricing with a Bland fallback after a
// stall, product-form eta updates over a dense LU refactorized periodically.
class Simplex {
 public:
  explicit Simplex(const LpProblem& p) : p_(p), m_(p.rows), n_(p.total()) {}

  LpResult solve(const std::vector<double>& lo, const std::vector<double>& hi) {
    lo_ = &lo;
    hi_ = &hi;
    init_basis();
    LpResult res;

    const int iter_cap = 2000 + 200 * (m_ + n_);
    bool phase1 = true;
    int stall = 0;
    double last_obj = kInf;
    for (iters_ = 0; iters_ < iter_cap; ++iters_) {
      if (phase1 && infeasibility() <= 10.0 * kFeasTol * (1 + std::abs(rhs_norm_))) {
        phase1 = false;
        stall = 0;
        last_obj = kInf;
      }
      compute_duals(phase1);
      const int q = price(phase1, stall > 100);
      if (q < 0) {
        if (phase1) {
          res.status = SolveStatus::Infeasible;
          res.iterations = iters_;
          return res;
        }
        return finish(res);
      }
      const double obj = phase1 ? infeasibility() : current_objective();
      if (obj < last_obj - 1e-12 * (1.0 + std::abs(last_obj))) {
        stall = 0;
        last_obj = obj;
      } else {
        ++stall;
      }
      bland_ = stall > 100;
      if (!step(q)) {
        if (phase1)
          throw SolverError("simplex: unbounded phase-1 descent");
        res.status = SolveStatus::Unbounded;
        res.iterations = iters_;
        return res;
      }
    }
    throw SolverError("simplex: iteration limit exceeded");
  }

 private:
  enum class Status : char { Basic, Lower, Upper, FreeZero };

  double lob(int j) const { return (*lo_)[j]; }
  double hib(int j) const { return (*hi_)[j]; }

  // Column j of [A I] as (row, value) pairs.
  void column(int j, std::vector<std::pair<int, double>>& out) const {
    out.clear();
    if (j < p_.structurals) {
      for (int t = p_.col_start[j]; t < p_.col_start[j + 1]; ++t)
        out.push_back({p_.row_index[t], p_.value[t]});
    } else {
      out.push_back({j - p_.structurals, 1.0});
    }
  }

  void init_basis() {
    basic_.resize(m_);
    stat_.assign(n_, Status::Lower);
    x_.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j) {
      if (j >= p_.structurals) continue;
      if (std::isfinite(lob(j))) {
        stat_[j] = Status::Lower;
        x_[j] = lob(j);
      } else if (std::isfinite(hib(j))) {
        stat_[j] = Status::Upper;
        x_[j] = hib(j);
      } else {
        stat_[j] = Status::FreeZero;
        x_[j] = 0.0;
      }
    }
    for (int r = 0; r < m_; ++r) {
      const int j = p_.structurals + r;
      basic_[r] = j;
      stat_[j] = Status::Basic;
    }
    rhs_norm_ = 0.0;
    for (double b : p_.rhs) rhs_norm_ = std::max(rhs_norm_, std::abs(b));
    refactorize();
    recompute_basics();
  }

  void refactorize() {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m_, m_);
    std::vector<std::pair<int, double>> col;
    for (int r = 0; r < m_; ++r) {
      column(basic_[r], col);
      for (const auto& [i, a] : col) B(i, r) = a;
    }
    lu_.compute(B);
    etas_.clear();
  }

  // w = B^{-1} a
  void ftran(Eigen::VectorXd& w) const {
    w = lu_.solve(w);
    for (const auto& e : etas_) {
      const double piv = w[e.r] / e.w[e.r];
      if (piv != 0.0) {
        w -= piv * e.w;
        w[e.r] = piv;
      } else {
        w[e.r] = 0.0;
      }
    }
  }

  // y solves B^T y = c
  void btran(Eigen::VectorXd& y) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double dot = 0.0;
      for (int i = 0; i < m_; ++i)
        if (i != it->r) dot += it->w[i] * y[i];
      y[it->r] = (y[it->r] - dot) / it->w[it->r];
    }
    // B^T y = c with PA = LU: A^T y = U^T L^T P y.
    const auto& LU = lu_.matrixLU();
    y = LU.template triangularView<Eigen::Upper>().transpose().solve(y);
    y = LU.template triangularView<Eigen::UnitLower>().transpose().solve(y);
    y = lu_.permutationP().transpose() * y;
  }

  void recompute_basics() {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(m_);
    for (int i = 0; i < m_; ++i) r[i] = p_.rhs[i];
    std::vector<std::pair<int, double>> col;
    for (int j = 0; j < n_; ++j) {
      if (stat_[j] == Status::Basic || x_[j] == 0.0) continue;
      column(j, col);
      for (const auto& [i, a] : col) r[i] -= a * x_[j];
    }
    ftran(r);
    for (int i = 0; i < m_; ++i) x_[basic_[i]] = r[i];
  }

  double infeasibility() const {
    double s = 0.0;
    for (int i = 0; i < m_; ++i) {
      const int j = basic_[i];
      if (x_[j] < lob(j)) s += lob(j) - x_[j];
      if (x_[j] > hib(j)) s += x_[j] - hib(j);
    }
    return s;
  }

  double current_objective() const {
    double s = 0.0;
    for (int j = 0; j < n_; ++j) s += p_.cost[j] * x_[j];
    return s;
  }

  void compute_duals(bool phase1) {
    Eigen::VectorXd cb = Eigen::VectorXd::Zero(m_);
    for (int i = 0; i < m_; ++i) {
      const int j = basic_[i];
      if (phase1) {
        if (x_[j] < lob(j) - kFeasTol)
          cb[i] = -1.0;
        else if (x_[j] > hib(j) + kFeasTol)
          cb[i] = 1.0;
      } else {
        cb[i] = p_.cost[j];
      }
    }
    y_ = cb;
    btran(y_);
  }

  double reduced_cost(int j, bool phase1) const {
    double c = phase1 ? 0.0 : p_.cost[j];
    if (j < p_.structurals) {
      for (int t = p_.col_start[j]; t < p_.col_start[j + 1]; ++t)
        c -= y_[p_.row_index[t]] * p_.value[t];
    } else {
      c -= y_[j - p_.structurals];
    }
    return c;
  }

  // Entering column, or -1 at optimality. dir_ records the movement sign.
  int price(bool phase1, bool bland) {
    int best = -1;
    double best_score = kFeasTol;
    for (int j = 0; j < n_; ++j) {
      if (stat_[j] == Status::Basic) continue;
      if (lob(j) == hib(j)) continue;  // fixed
      const double d = reduced_cost(j, phase1);
      double score = 0.0;
      int dir = 0;
      if ((stat_[j] == Status::Lower || stat_[j] == Status::FreeZero) && d < -kFeasTol) {
        score = -d;
        dir = 1;
      } else if ((stat_[j] == Status::Upper || stat_[j] == Status::FreeZero) &&
                 d > kFeasTol) {
        score = d;
        dir = -1;
      }
      if (dir == 0) continue;
      if (bland) {
        best = j;
        dir_ = dir;
        return j;
      }
      if (score > best_score) {
        best_score = score;
        best = j;
        dir_ = dir;
      }
    }
    return best;
  }

  // One pivot (or bound flip). Returns false on unbounded direction.
  bool step(int q) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(m_);
    std::vector<std::pair<int, double>> col;
    column(q, col);
    for (const auto& [i, a] : col) w[i] = a;
    ftran(w);

    // Movement of basic i per unit increase of t: -dir * w[i].
    double t_max = kInf;
    int leave = -1;        // basic position
    double leave_to = 0;   // bound the leaving variable lands on
    const double span = hib(q) - lob(q);
    if (std::isfinite(span)) t_max = span;

    for (int i = 0; i < m_; ++i) {
      const double delta = -dir_ * w[i];
      if (std::abs(delta) < 1e-11) continue;
      const int j = basic_[i];
      double limit = kInf, target = 0.0;
      if (delta > 0) {
        if (x_[j] < lob(j) - kFeasTol) {
          // Below its lower bound and rising: blocks when it turns feasible.
          limit = (lob(j) - x_[j]) / delta;
          target = lob(j);
        } else if (x_[j] <= hib(j) + kFeasTol && std::isfinite(hib(j))) {
          limit = (hib(j) - x_[j]) / delta;
          target = hib(j);
        }  // already above the upper bound and rising: never blocks
      } else {
        if (x_[j] > hib(j) + kFeasTol) {
          limit = (hib(j) - x_[j]) / delta;
          target = hib(j);
        } else if (x_[j] >= lob(j) - kFeasTol && std::isfinite(lob(j))) {
          limit = (lob(j) - x_[j]) / delta;
          target = lob(j);
        }
      }
      if (limit == kInf) continue;
      if (limit < 0.0) limit = 0.0;
      const double tie = 1e-9 * (1.0 + (std::isfinite(t_max) ? t_max : 0.0));
      if (limit < t_max - tie) {
        t_max = limit;
        leave = i;
        leave_to = target;
      } else if (leave >= 0 && limit <= t_max + tie) {
        // Tie: prefer the stabler pivot, or the lowest index under Bland.
        const bool pick = bland_ ? basic_[i] < basic_[leave]
                                 : std::abs(w[i]) > std::abs(w[leave]);
        if (pick) {
          t_max = std::min(t_max, limit);
          leave = i;
          leave_to = target;
        }
      }
    }

    if (!std::isfinite(t_max)) return false;

    // Apply the move.
    const double t = t_max;
    for (int i = 0; i < m_; ++i)
      if (w[i] != 0.0) x_[basic_[i]] -= dir_ * t * w[i];
    x_[q] += dir_ * t;

    if (leave < 0) {
      // Bound-to-bound flip.
      stat_[q] = dir_ > 0 ? Status::Upper : Status::Lower;
      x_[q] = dir_ > 0 ? hib(q) : lob(q);
      return true;
    }

    const int out = basic_[leave];
    x_[out] = leave_to;
    stat_[out] = leave_to == lob(out)
                     ? Status::Lower
                     : (leave_to == hib(out) ? Status::Upper : Status::Lower);
    if (!std::isfinite(lob(out)) && !std::isfinite(hib(out))) stat_[out] = Status::FreeZero;
    basic_[leave] = q;
    stat_[q] = Status::Basic;

    if (std::abs(w[leave]) < 1e-9 || static_cast<int>(etas_.size()) >= 64) {
      refactorize();
      recompute_basics();
    } else {
      etas_.push_back({leave, w});
    }
    return true;
  }

  LpResult finish(LpResult res) {
    recompute_basics();
    res.status = SolveStatus::Optimal;
    res.iterations = iters_;
    res.x.assign(x_.begin(), x_.begin() + p_.structurals);
    res.objective = current_objective() + p_.objective_offset;
    compute_duals(false);
    res.duals.assign(y_.data(), y_.data() + m_);
    res.reduced_costs.resize(p_.structurals);
    for (int j = 0; j < p_.structurals; ++j)
      res.reduced_costs[j] = reduced_cost(j, false);
    return res;
  }

  struct Eta {
    int r;
    Eigen::VectorXd w;
  };

  const LpProblem& p_;
  int m_, n_;
  const std::vector<double>* lo_ = nullptr;
  const std::vector<double>* hi_ = nullptr;
  std::vector<int> basic_;
  std::vector<Status> stat_;
  std::vector<double> x_;
  Eigen::VectorXd y_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  std::vector<Eta> etas_;
  int dir_ = 1;
  bool bland_ = false;
  long iters_ = 0;
  double rhs_norm_ = 0.0;
};

// Solves the LP relaxation (binaries relaxed to their bounds).
inline LpResult solve_lp(const LpProblem& p, const std::vector<double>& lo,
                         const std::vector<double>& hi) {
  Simplex s(p);
  return s.solve(lo, hi);
}

inline LpResult solve_lp(const MilpInstance& inst) {
  LpProblem p = LpProblem::from_instance(inst);
  return solve_lp(p, p.lo, p.hi);
}

}  // namespace gridplan
