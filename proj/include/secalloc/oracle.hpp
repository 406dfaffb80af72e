#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "secalloc/dynamics.hpp"
#include "secalloc/errors.hpp"
#include "secalloc/graph.hpp"

namespace secalloc {

// Slow reference implementations used to cross-check the production code
// paths.  They share as little machinery with those paths as practical.

// Literal reading of the covering definition: every vertex is a monitor or
// has a monitor among its neighbors, checked against the dense adjacency
// matrix with no early exit.
inline bool dominating_oracle(const Network& net,
                              const std::vector<int>& vertices) {
  const Eigen::MatrixXd A = adjacency(net);
  std::vector<char> in_set(net.n, 0);
  for (int v : vertices) {
    if (v < 0 || v >= net.n) throw GraphError("monitor vertex out of range");
    in_set[v] = 1;
  }
  bool all_covered = true;
  for (int i = 0; i < net.n; ++i) {
    bool covered = in_set[i] != 0;
    for (int j = 0; j < net.n; ++j)
      if (in_set[j] && A(i, j) > 0.0) covered = true;
    all_covered = all_covered && covered;
  }
  return all_covered;
}

inline bool dominating_oracle(const Network& net, const MonitorSet& m) {
  return dominating_oracle(net, m.vertices);
}

// Reference value for the single-monitor impact bound: delta_m times the
// largest response-energy ratio found on a dense log-frequency grid, with a
// golden-section polish around the winning cell.  Every sample is a direct
// complex solve of (jwI + lbar) z = e_a, so none of the polynomial machinery
// the production bound rests on is involved.
inline double sweep_ratio_oracle(const ClosedLoopSystem& sys, int attack,
                                 int target, int monitor, double delta_m,
                                 int grid_size = 100000) {
  const int n = sys.n();
  for (int v : {attack, target, monitor})
    if (v < 0 || v >= n) throw GraphError("vertex out of range");
  if (grid_size < 3) grid_size = 3;

  Eigen::MatrixXcd M(n, n);
  const auto ratio_at = [&](double w) -> double {
    M = sys.lbar.cast<std::complex<double>>();
    for (int i = 0; i < n; ++i) M(i, i) += std::complex<double>(0.0, w);
    const Eigen::VectorXcd z =
        M.partialPivLu().solve(Eigen::VectorXcd::Unit(n, attack));
    return std::norm(z(target)) / std::norm(z(monitor));
  };

  const double lw0 = std::log(1e-6), lw1 = std::log(1e6);
  double best = ratio_at(0.0);  // the log grid cannot reach zero itself
  double best_lw = lw0;
  for (int i = 0; i < grid_size; ++i) {
    const double lw = lw0 + (lw1 - lw0) * i / (grid_size - 1);
    const double r = ratio_at(std::exp(lw));
    if (r > best) {
      best = r;
      best_lw = lw;
    }
  }
  const double cell = (lw1 - lw0) / (grid_size - 1);
  double lo = best_lw - cell, hi = best_lw + cell;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = ratio_at(std::exp(x1)), f2 = ratio_at(std::exp(x2));
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = ratio_at(std::exp(x2));
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = ratio_at(std::exp(x1));
    }
  }
  return delta_m * std::max({best, f1, f2});
}

namespace detail {

// Scaling-and-squaring matrix exponential with a diagonal Pade order-6
// approximant; comfortable at the step bound enforced below.
inline Eigen::MatrixXd expm_pade6(Eigen::MatrixXd A) {
  const int n = static_cast<int>(A.rows());
  int squarings = 0;
  double nrm = A.cwiseAbs().rowwise().sum().maxCoeff();
  while (nrm > 0.5) {
    nrm *= 0.5;
    A *= 0.5;
    ++squarings;
  }
  static const double bc[7] = {1.0,         0.5,           5.0 / 44.0,
                               1.0 / 66.0,  1.0 / 792.0,   1.0 / 15840.0,
                               1.0 / 665280.0};
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd A2 = A * A;
  const Eigen::MatrixXd A4 = A2 * A2;
  const Eigen::MatrixXd A6 = A2 * A4;
  const Eigen::MatrixXd U = A * (bc[1] * I + bc[3] * A2 + bc[5] * A4);
  const Eigen::MatrixXd V = bc[0] * I + bc[2] * A2 + bc[4] * A4 + bc[6] * A6;
  Eigen::MatrixXd E = (V - U).partialPivLu().solve(V + U);
  for (int s = 0; s < squarings; ++s) E = E * E;
  return E;
}

}  // namespace detail

// Finite-horizon, finite-dimensional restriction of the attack problem:
// piecewise-constant inputs on `coarse` intervals, integrated exactly under
// the hold with sampled outputs at the target and each monitored vertex.
struct DiscretizedAttackProblem {
  double step = 0.0;  // integration step h, chosen so h * lambda_max <= 0.1
  int horizon = 0;    // fine step count K, chosen so K * h >= 50 / lambda_min
  int coarse = 0;     // piecewise-constant input intervals spanning the horizon
  int stride = 0;     // fine steps per coarse interval; horizon = coarse * stride
  int attack = 0;
  int target = 0;
  std::vector<int> monitored;
  // One base response per tracked vertex (target first, then the monitored
  // vertices in order): sampled output for a unit input held over the first
  // coarse interval and zero afterwards.  Time invariance makes column c of
  // the full input-to-output map this very signal delayed by c * stride
  // samples, so the base responses carry the whole map.
  std::vector<std::vector<double>> input_map;
};

inline DiscretizedAttackProblem make_discretized_problem(
    const ClosedLoopSystem& sys, int attack, int target,
    const MonitorSet& m_set, int coarse = 256, double horizon_scale = 1.0) {
  const int n = sys.n();
  for (int v : m_set.vertices)
    if (v < 0 || v >= n) throw GraphError("vertex out of range");
  if (attack < 0 || attack >= n || target < 0 || target >= n)
    throw GraphError("vertex out of range");
  if (coarse < 2) coarse = 2;
  if (!(horizon_scale > 0.0)) horizon_scale = 1.0;

  const double lmax = sys.eigenvalues(n - 1);
  const double lmin = sys.eigenvalues(0);
  DiscretizedAttackProblem p;
  p.attack = attack;
  p.target = target;
  p.monitored = m_set.vertices;
  p.coarse = coarse;
  p.step = 0.1 / lmax;
  const double horizon_time = 50.0 / lmin * horizon_scale;
  p.stride = std::max(
      1, static_cast<int>(std::ceil(horizon_time / (p.step * coarse))));
  p.horizon = p.stride * coarse;

  // Exact one-step map under the hold: x+ = E x + F u.
  const Eigen::MatrixXd E = detail::expm_pade6(-p.step * sys.lbar);
  const Eigen::VectorXd F = sys.lbar.partialPivLu().solve(
      (Eigen::MatrixXd::Identity(n, n) - E) * Eigen::VectorXd::Unit(n, attack));

  std::vector<int> tracked{target};
  for (int m : p.monitored) tracked.push_back(m);
  p.input_map.assign(tracked.size(), std::vector<double>(p.horizon, 0.0));
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < p.horizon; ++i) {
    x = (E * x).eval();
    if (i < p.stride) x += F;  // unit input over the first coarse interval
    for (std::size_t t = 0; t < tracked.size(); ++t)
      p.input_map[t][i] = x(tracked[t]);
  }
  return p;
}

// Largest reachable output-energy ratio of the finite-dimensional
// restriction.  One monitor: a generalized symmetric eigenproblem between
// the two energy forms, scaled by the threshold.  Two monitors: the exact
// value of the two-constraint problem is the minimum over the multiplier
// direction t of the one-form ratio against t*Q1/d1 + (1-t)*Q2/d2; that
// section is quasiconvex in t, so a golden-section search with endpoint
// checks finds it.  The 1/T normalization of the energies cancels.
inline double discretized_impact_oracle(const DiscretizedAttackProblem& p,
                                        const std::vector<double>& delta) {
  const int nm = static_cast<int>(p.monitored.size());
  if (nm < 1 || nm > 2)
    throw ScopeError("discretized oracle covers one or two monitors only");
  if (static_cast<int>(delta.size()) != nm)
    throw ScopeError("one threshold per monitored vertex");
  for (double d : delta)
    if (!(d > 0.0)) throw ScopeError("thresholds must be positive");

  const int kc = p.coarse, s = p.stride, K = p.horizon;
  // Energy Gram matrix over coarse input coefficients:
  //   Q[a][b] = h * sum_i y[i - a*s] * y[i - b*s]
  // computed as one truncated-autocorrelation pass per lag.
  const auto gram = [&](const std::vector<double>& y) {
    Eigen::MatrixXd Q(kc, kc);
    for (int lag = 0; lag < kc; ++lag) {
      const int d = lag * s;
      long double acc = 0.0L;
      int j = 0;
      for (int a = kc - 1; a >= lag; --a) {
        const int stop = K - a * s;
        for (; j < stop; ++j) acc += static_cast<long double>(y[j]) * y[j + d];
        const double q = static_cast<double>(p.step * acc);
        Q(a, a - lag) = q;
        Q(a - lag, a) = q;
      }
    }
    return Q;
  };

  const Eigen::MatrixXd Qr = gram(p.input_map[0]);
  std::vector<Eigen::MatrixXd> Qm;
  for (int t = 0; t < nm; ++t)
    Qm.push_back(gram(p.input_map[1 + t]) / delta[t]);

  const auto top_ratio = [&](const Eigen::MatrixXd& B) {
    // An input invisible to the monitors would make the denominator form
    // singular; a trace-proportional ridge keeps it positive definite (and
    // scales with the thresholds, so threshold linearity stays exact).
    Eigen::MatrixXd breg = B;
    const double ridge = 1e-10 * B.trace() / kc;
    for (int i = 0; i < kc; ++i) breg(i, i) += ridge;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Qr, breg);
    return es.eigenvalues().maxCoeff();
  };

  if (nm == 1) return top_ratio(Qm[0]);

  const auto at = [&](double t) {
    return top_ratio(t * Qm[0] + (1.0 - t) * Qm[1]);
  };
  double lo = 1e-6, hi = 1.0 - 1e-6;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  const double end_lo = at(lo), end_hi = at(hi);
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = at(x1), f2 = at(x2);
  for (int it = 0; it < 40; ++it) {
    if (f1 > f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = at(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = at(x1);
    }
  }
  return std::min({f1, f2, end_lo, end_hi});
}

}  // namespace secalloc
