#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "secalloc/errors.hpp"

namespace secalloc::detail {

enum class LpStatus { Optimal, Infeasible };

struct LpResult {
  LpStatus status = LpStatus::Optimal;
  std::vector<double> x;
  double objective = 0.0;
};

// min c.x  s.t.  A x >= b, x >= 0, with c >= 0 (checked).
//
// The instances this library produces have a lopsided shape: a handful of
// structural variables against hundreds of near-duplicate cutting-plane
// rows.  A condensed-tableau simplex is the wrong tool for that — long
// degenerate walks inflate tableau entries without bound (growth past 1e11
// observed) until the reduced-cost row is noise.  So the problem is solved
// through its dual,  max b.y  s.t.  A'y <= c, y >= 0,  where the shape is
// an asset instead: c >= 0 makes the all-slack basis feasible from the
// start (no phase 1), and the basis is k x k for k structural variables —
// small enough to refactorise from the original data on every step, which
// leaves accumulated error nowhere to live.  Bland's entering rule keeps
// the walk deterministic and cycle-free.  At optimality the negated
// multipliers are the primal solution; a nonnegative reduced cost on dual
// column j IS row j's primal constraint, so primal feasibility comes out
// certified rather than hoped for.  A dual ray means the primal is
// infeasible; with c >= 0 the primal value is bounded below by zero, so an
// unbounded outcome cannot exist.
inline LpResult solve_lp_min_ge(const std::vector<double>& c,
                                const std::vector<std::vector<double>>& A,
                                const std::vector<double>& b,
                                int max_iter = 50000) {
  const int k = static_cast<int>(c.size());
  const int m = static_cast<int>(A.size());
  for (double cj : c)
    if (!(cj >= 0.0))
      throw std::invalid_argument("solve_lp_min_ge requires nonnegative costs");
  LpResult res;
  res.x.assign(k, 0.0);
  if (m == 0) return res;  // no constraints: the origin is optimal
  if (k == 0) {
    for (double bi : b)
      if (bi > 0.0) res.status = LpStatus::Infeasible;
    return res;
  }

  // Row normalisation rescales the matching dual variable only; the primal
  // point recovered from the multipliers is unaffected.
  std::vector<std::vector<double>> an(m, std::vector<double>(k));
  std::vector<double> bn(m);
  for (int i = 0; i < m; ++i) {
    double s = std::abs(b[i]);
    for (int j = 0; j < k; ++j) s = std::max(s, std::abs(A[i][j]));
    if (!(s > 0.0)) s = 1.0;
    for (int j = 0; j < k; ++j) an[i][j] = A[i][j] / s;
    bn[i] = b[i] / s;
  }

  // Dual constraint matrix: column j < m is primal row j, then the k slack
  // columns of the identity.
  const auto col = [&](int j, int r) -> double {
    return j < m ? an[j][r] : (j - m == r ? 1.0 : 0.0);
  };
  const auto cost = [&](int j) -> double { return j < m ? -bn[j] : 0.0; };

  std::vector<int> basis(k);
  for (int r = 0; r < k; ++r) basis[r] = m + r;

  // Fresh LU (partial pivoting, long double) of the k x k basis each step.
  std::vector<std::vector<long double>> lu;
  std::vector<int> perm;
  auto factor = [&]() {
    lu.assign(k, std::vector<long double>(k));
    perm.resize(k);
    for (int r = 0; r < k; ++r)
      for (int q = 0; q < k; ++q) lu[r][q] = col(basis[q], r);
    for (int r = 0; r < k; ++r) perm[r] = r;
    for (int p = 0; p < k; ++p) {
      int pm = p;
      for (int r = p + 1; r < k; ++r)
        if (fabsl(lu[r][p]) > fabsl(lu[pm][p])) pm = r;
      std::swap(lu[p], lu[pm]);
      std::swap(perm[p], perm[pm]);
      if (!(fabsl(lu[p][p]) > 1e-18L))
        throw NumericalError("lp basis became numerically singular");
      for (int r = p + 1; r < k; ++r) {
        lu[r][p] /= lu[p][p];
        for (int q = p + 1; q < k; ++q) lu[r][q] -= lu[r][p] * lu[p][q];
      }
    }
  };
  // B z = rhs via P B = L U.
  auto solve_basis = [&](const std::vector<long double>& rhs) {
    std::vector<long double> z(k);
    for (int r = 0; r < k; ++r) z[r] = rhs[perm[r]];
    for (int r = 0; r < k; ++r)
      for (int q = 0; q < r; ++q) z[r] -= lu[r][q] * z[q];
    for (int r = k - 1; r >= 0; --r) {
      for (int q = r + 1; q < k; ++q) z[r] -= lu[r][q] * z[q];
      z[r] /= lu[r][r];
    }
    return z;
  };
  // B' w = rhs:  B' = U' L' P, so solve U' v = rhs, L' u = v, w = P' u.
  auto solve_basis_t = [&](const std::vector<long double>& rhs) {
    std::vector<long double> v(k);
    for (int r = 0; r < k; ++r) {
      v[r] = rhs[r];
      for (int q = 0; q < r; ++q) v[r] -= lu[q][r] * v[q];
      v[r] /= lu[r][r];
    }
    for (int r = k - 1; r >= 0; --r)
      for (int q = r + 1; q < k; ++q) v[r] -= lu[q][r] * v[q];
    std::vector<long double> w(k);
    for (int r = 0; r < k; ++r) w[perm[r]] = v[r];
    return w;
  };

  std::vector<long double> crhs(k);
  for (int r = 0; r < k; ++r) crhs[r] = c[r];
  std::vector<char> is_basic(m + k, 0);
  for (int r = 0; r < k; ++r) is_basic[basis[r]] = 1;

  for (int iter = 0; iter < max_iter; ++iter) {
    factor();
    const std::vector<long double> yb = solve_basis(crhs);
    std::vector<long double> cb(k);
    for (int r = 0; r < k; ++r) cb[r] = cost(basis[r]);
    const std::vector<long double> pi = solve_basis_t(cb);
    long double piscale = 1.0L;
    for (int r = 0; r < k; ++r) piscale = std::max(piscale, fabsl(pi[r]));

    int enter = -1;
    for (int j = 0; j < m + k && enter < 0; ++j) {
      if (is_basic[j]) continue;
      long double red = cost(j);
      for (int r = 0; r < k; ++r) red -= pi[r] * col(j, r);
      if (red < -1e-11L * piscale) enter = j;
    }
    if (enter < 0) {
      for (int r = 0; r < k; ++r)
        res.x[r] = std::max(0.0, static_cast<double>(-pi[r]));
      long double obj = 0.0L;
      for (int r = 0; r < k; ++r)
        obj += static_cast<long double>(c[r]) * res.x[r];
      res.objective = static_cast<double>(obj);
      return res;
    }

    std::vector<long double> e(k);
    for (int r = 0; r < k; ++r) e[r] = col(enter, r);
    const std::vector<long double> d = solve_basis(e);
    int leave = -1;
    long double best = 0.0L;
    for (int r = 0; r < k; ++r) {
      if (!(d[r] > 1e-11L)) continue;
      const long double ratio = std::max(yb[r], 0.0L) / d[r];
      if (leave < 0 || ratio < best ||
          (ratio == best && basis[r] < basis[leave])) {
        leave = r;
        best = ratio;
      }
    }
    if (leave < 0) {
      res.status = LpStatus::Infeasible;  // dual ray: no primal point exists
      res.x.assign(k, 0.0);
      return res;
    }
    is_basic[basis[leave]] = 0;
    is_basic[enter] = 1;
    basis[leave] = enter;
  }
  throw NumericalError("lp pivot budget exhausted");
}

}  // namespace secalloc::detail
