#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "secalloc/errors.hpp"
#include "secalloc/graph.hpp"
#include "secalloc/polynomial.hpp"

namespace secalloc {

namespace detail {

// Shared per-system cache.  Values are pure functions of the system, so a
// lost insertion race only means the same coefficients were computed twice;
// every reader still sees one canonical vector per key.
struct SystemMemo {
  std::mutex mx;
  std::map<std::pair<int, int>, Poly> numerators;
  std::map<std::pair<int, int>, Poly> densities;
  std::vector<Poly> deflated;  // prod_{l != k} (s + lambda_l), lazily built
};

}  // namespace detail

// Closed-loop consensus dynamics xdot = -(L + diag(theta)) x + e_a * attack,
// with per-vertex outputs y_i = x_i.  Immutable after construction apart
// from the memo tables.
struct ClosedLoopSystem {
  Network net;
  Eigen::MatrixXd lbar;          // L + diag(theta), symmetric positive definite
  Eigen::VectorXd eigenvalues;   // ascending, all positive
  Eigen::MatrixXd eigenvectors;  // orthonormal columns, lbar = V diag V^T
  Poly charpoly;                 // det(sI + lbar), monic of degree n
  double norm = 0.0;             // spectral norm of lbar
  std::vector<std::vector<int>> dist;  // hop distances
  std::shared_ptr<detail::SystemMemo> memo;

  int n() const { return net.n; }
};

namespace detail {

// Characteristic polynomial of -lbar via the trace recurrence
// (Faddeev-LeVerrier), giving det(sI + lbar) directly.
inline Poly leverrier_charpoly(const Eigen::MatrixXd& lbar) {
  const int n = static_cast<int>(lbar.rows());
  const Eigen::MatrixXd A = -lbar;
  std::vector<double> c(n + 1, 0.0);
  c[n] = 1.0;
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n);
  for (int k = 1; k <= n; ++k) {
    const Eigen::MatrixXd AM = A * M;
    c[n - k] = -AM.trace() / static_cast<double>(k);
    if (k < n) M = AM + c[n - k] * Eigen::MatrixXd::Identity(n, n);
  }
  return Poly(std::move(c));
}

}  // namespace detail

inline ClosedLoopSystem build_system(const Network& net) {
  ClosedLoopSystem sys;
  sys.net = net;
  sys.lbar = laplacian(net);
  for (int i = 0; i < net.n; ++i) sys.lbar(i, i) += net.theta[i];

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sys.lbar);
  if (es.info() != Eigen::Success)
    throw NumericalError("closed-loop eigendecomposition failed");
  sys.eigenvalues = es.eigenvalues();
  sys.eigenvectors = es.eigenvectors();
  sys.norm = sys.eigenvalues(net.n - 1);
  if (!(sys.eigenvalues(0) > 1e-12 * std::max(1.0, sys.norm)))
    throw NumericalError("closed-loop matrix is not positive definite");

  sys.charpoly = detail::leverrier_charpoly(sys.lbar);
  sys.dist = all_pairs_distance(net);
  sys.memo = std::make_shared<detail::SystemMemo>();
  return sys;
}

// First index k with e_out^T (-lbar)^k e_a nonzero gives relative degree
// k + 1.  The walk structure makes the test exact (entries below the hop
// distance are structural zeros), and the hop-distance formula must agree;
// disagreement means floating-point cancellation corrupted the iterates.
inline int relative_degree(const ClosedLoopSystem& sys, int out, int a) {
  const int n = sys.n();
  if (out < 0 || out >= n || a < 0 || a >= n)
    throw InvalidScenario("vertex out of range");
  const int by_distance = sys.dist[out][a] + 1;

  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  v(a) = 1.0;
  double scale = 1.0;  // ||lbar||^k
  int by_markov = 0;
  for (int k = 0; k < n; ++k) {
    if (std::abs(v(out)) > 1e-9 * scale) {
      by_markov = k + 1;
      break;
    }
    v = -(sys.lbar * v);
    scale *= std::max(sys.norm, 1.0);
  }
  if (by_markov == 0)
    throw NumericalError("no nonzero Markov parameter within n steps");
  if (by_markov != by_distance)
    throw NumericalError("Markov relative degree disagrees with hop distance");
  return by_markov;
}

namespace detail {

// Transfer numerator by evaluation-interpolation: sample the adjugate entry
// det(sI+lbar) * e_out^T (sI+lbar)^{-1} e_a at the (n+1)-th roots of unity
// scaled to |s| = 2||lbar||, then invert the DFT.  The circle keeps every
// node at distance >= ||lbar|| from the poles on the negative real axis and
// the node matrix is unitary up to scaling.  Recovered coefficient k carries
// an absolute error floor of roughly eps * max|P on circle| / rho^k, so this
// route serves as an independent cross-check of the spectral one rather than
// as the production path.
inline Poly numerator_by_interpolation(const ClosedLoopSystem& sys, int out,
                                       int a) {
  const int n = sys.n();
  const int m = n + 1;
  const double rho = 2.0 * std::max(sys.norm, 1e-6);
  std::vector<std::complex<double>> vals(m);
  Eigen::VectorXcd e_a = Eigen::VectorXcd::Zero(n);
  e_a(a) = 1.0;
  for (int j = 0; j < m; ++j) {
    const std::complex<double> s =
        std::polar(rho, 2.0 * M_PI * static_cast<double>(j) / m);
    Eigen::MatrixXcd M_s = sys.lbar.cast<std::complex<double>>();
    M_s.diagonal().array() += s;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M_s);
    vals[j] = lu.determinant() * lu.solve(e_a)(out);
  }
  // c_k rho^k = (1/m) sum_j vals[j] w^{-jk}; the coefficients are real, so
  // only the real part of the average survives.
  std::vector<double> coeffs(m);
  double rk = 1.0;
  for (int k = 0; k < m; ++k) {
    long double acc = 0.0L;
    for (int j = 0; j < m; ++j) {
      const double ang = -2.0 * M_PI * static_cast<double>((j * k) % m) / m;
      acc += static_cast<long double>(vals[j].real()) * std::cos(ang) -
             static_cast<long double>(vals[j].imag()) * std::sin(ang);
    }
    coeffs[k] = static_cast<double>(acc / m) / rk;
    rk *= rho;
  }
  return Poly(std::move(coeffs));
}

inline void ensure_deflated(const ClosedLoopSystem& sys) {
  {
    std::lock_guard<std::mutex> lk(sys.memo->mx);
    if (!sys.memo->deflated.empty()) return;
  }
  const int n = sys.n();
  std::vector<Poly> def(n);
  for (int k = 0; k < n; ++k) {
    Poly p = Poly::constant(1.0);
    for (int l = 0; l < n; ++l) {
      if (l == k) continue;
      p = p * Poly(std::vector<double>{sys.eigenvalues(l), 1.0});
    }
    def[k] = std::move(p);
  }
  std::lock_guard<std::mutex> lk(sys.memo->mx);
  if (sys.memo->deflated.empty()) sys.memo->deflated = std::move(def);
}

// Spectral route: e_out^T adj(sI+lbar) e_a = sum_k V_ok V_ak prod_{l!=k}
// (s + lambda_l).  Stable at sizes where monomial interpolation is not;
// coefficients above the structural degree cancel and are truncated.
inline Poly numerator_by_spectrum(const ClosedLoopSystem& sys, int out, int a) {
  ensure_deflated(sys);
  const int n = sys.n();
  std::vector<long double> acc(n, 0.0L);
  for (int k = 0; k < n; ++k) {
    const long double w = static_cast<long double>(sys.eigenvectors(out, k)) *
                          sys.eigenvectors(a, k);
    if (w == 0.0L) continue;
    const Poly& d = sys.memo->deflated[k];
    for (int j = 0; j <= d.degree(); ++j) acc[j] += w * d.coeff(j);
  }
  std::vector<double> coeffs(n);
  for (int j = 0; j < n; ++j) coeffs[j] = static_cast<double>(acc[j]);
  return Poly(std::move(coeffs));
}

}  // namespace detail

// Numerator polynomial of the transfer path a -> out, i.e. P with
// e_out^T (sI + lbar)^{-1} e_a = P(s) / det(sI + lbar).  Symmetric in
// (out, a); degree exactly n - relative_degree.  Cached per system.
inline Poly numerator(const ClosedLoopSystem& sys, int out, int a) {
  const int n = sys.n();
  if (out < 0 || out >= n || a < 0 || a >= n)
    throw InvalidScenario("vertex out of range");
  const std::pair<int, int> key{std::min(out, a), std::max(out, a)};
  {
    std::lock_guard<std::mutex> lk(sys.memo->mx);
    auto it = sys.memo->numerators.find(key);
    if (it != sys.memo->numerators.end()) return it->second;
  }
  // The spectral form keeps every partial product nonnegative, so its error
  // tracks the modest eigenvector mass rather than the huge circle maxima
  // the sampling route is exposed to.  It wins at every size.
  Poly p = detail::numerator_by_spectrum(sys, key.first, key.second);
  const int r = sys.dist[out][a] + 1;
  p.truncate_above(n - r);
  std::lock_guard<std::mutex> lk(sys.memo->mx);
  auto [it, inserted] = sys.memo->numerators.emplace(key, std::move(p));
  return it->second;
}

struct ZeroEntry {
  int a = 0;
  int out = 0;
  std::vector<std::complex<double>> zeros;  // sorted by (re, im)
};

struct ZeroReport {
  std::vector<ZeroEntry> entries;
  double max_real_part = -std::numeric_limits<double>::infinity();
};

// Transmission zeros of the path a -> out: roots of the numerator, verified
// by a backward-error residual test.
inline ZeroEntry invariant_zeros(const ClosedLoopSystem& sys, int out, int a) {
  const Poly p = numerator(sys, out, a);
  ZeroEntry entry{a, out, {}};
  if (p.degree() == 0) {
    if (p.coeff(0) == 0.0)
      throw NumericalError("identically zero transfer numerator");
    return entry;
  }
  entry.zeros = poly_roots(p);
  if (static_cast<int>(entry.zeros.size()) != p.degree())
    throw RootSolveError("zero count does not match numerator degree");
  for (const auto& z : entry.zeros) {
    long double denom = 0.0L;
    long double zp = 1.0L;
    const long double za = std::abs(z);
    for (int k = 0; k <= p.degree(); ++k) {
      denom += fabsl((long double)p.coeff(k)) * zp;
      zp *= za;
    }
    const double resid =
        std::abs(p.eval_c(z)) / static_cast<double>(denom + 1e-300);
    if (!(resid <= 1e-10))
      throw RootSolveError("transmission zero failed the residual test");
  }
  return entry;
}

// Zeros of every unordered transfer pair; max_real_part drives gain tuning.
inline ZeroReport zero_report(const ClosedLoopSystem& sys) {
  ZeroReport report;
  for (int a = 0; a < sys.n(); ++a)
    for (int out = a; out < sys.n(); ++out) {
      ZeroEntry e = invariant_zeros(sys, out, a);
      for (const auto& z : e.zeros)
        report.max_real_part = std::max(report.max_real_part, z.real());
      report.entries.push_back(std::move(e));
    }
  return report;
}

// Uniform self-loop lift: if any transmission zero reaches past -margin,
// raise every gain by (mu + margin) so the whole zero set shifts left of
// -margin.  A uniform diagonal offset translates all zeros exactly.
inline Network tune_self_loops(const Network& net, double margin) {
  if (!(margin > 0.0)) throw std::invalid_argument("margin must be positive");
  const ClosedLoopSystem sys = build_system(net);
  const ZeroReport report = zero_report(sys);
  const double mu = report.max_real_part;
  if (!(mu > -margin)) return net;

  Network tuned = net;
  for (double& g : tuned.theta) g += mu + margin;
  return Network::create(tuned.n, tuned.edges, tuned.theta, tuned.delta,
                         tuned.weights);
}

}  // namespace secalloc
