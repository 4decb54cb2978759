#pragma once

// Test-side oracles, kept independent of the library's solution paths.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

namespace oracle {

// Dense box LP: min c'x s.t. A x <= b, lo <= x <= hi (all finite).
struct BoxLp {
  Eigen::MatrixXd A;
  Eigen::VectorXd b, c, lo, hi;
};

// Exhaustive vertex enumeration: every choice of n tight constraints among
// the m rows and 2n bounds is solved and checked for feasibility.
inline std::optional<double> vertex_enum_min(const BoxLp& lp) {
  const int n = static_cast<int>(lp.c.size());
  const int m = static_cast<int>(lp.b.size());
  const int total = m + 2 * n;
  std::optional<double> best;

  std::vector<int> pick(n, 0);
  // Enumerate n-subsets of [0, total).
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  auto advance = [&]() {
    int i = n - 1;
    while (i >= 0 && idx[i] == total - n + i) --i;
    if (i < 0) return false;
    ++idx[i];
    for (int j = i + 1; j < n; ++j) idx[j] = idx[j - 1] + 1;
    return true;
  };
  do {
    Eigen::MatrixXd M(n, n);
    Eigen::VectorXd r(n);
    for (int i = 0; i < n; ++i) {
      const int k = idx[i];
      if (k < m) {
        M.row(i) = lp.A.row(k);
        r[i] = lp.b[k];
      } else if (k < m + n) {
        M.row(i).setZero();
        M(i, k - m) = 1.0;
        r[i] = lp.lo[k - m];
      } else {
        M.row(i).setZero();
        M(i, k - m - n) = 1.0;
        r[i] = lp.hi[k - m - n];
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (!lu.isInvertible()) continue;
    Eigen::VectorXd x = lu.solve(r);
    bool ok = true;
    for (int j = 0; j < n && ok; ++j)
      ok = x[j] >= lp.lo[j] - 1e-8 && x[j] <= lp.hi[j] + 1e-8;
    for (int i = 0; i < m && ok; ++i)
      ok = lp.A.row(i).dot(x) <= lp.b[i] + 1e-8;
    if (!ok) continue;
    const double v = lp.c.dot(x);
    if (!best || v < *best) best = v;
  } while (advance());
  return best;
}

// Deterministic uniform stream (splitmix64), identical across platforms.
inline double u01(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  z ^= z >> 31;
  return (z >> 11) * 0x1.0p-53;
}

}  // namespace oracle
