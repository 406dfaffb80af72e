#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "secalloc/errors.hpp"

namespace secalloc {

// Dense univariate polynomial with real coefficients in ascending power
// order: c[k] multiplies x^k.  Evaluation accumulates in long double so
// that frequency grids reaching x = 1e6 combined with coefficients spanning
// many decades stay inside the exponent range.
class Poly {
 public:
  Poly() : c_{0.0} {}
  explicit Poly(std::vector<double> c) : c_(std::move(c)) {
    if (c_.empty()) c_.push_back(0.0);
    trim();
  }

  static Poly constant(double v) { return Poly(std::vector<double>{v}); }

  static Poly from_roots(const std::vector<double>& roots, double lead = 1.0) {
    Poly p = constant(lead);
    for (double r : roots) p = p * Poly(std::vector<double>{-r, 1.0});
    return p;
  }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.size() == 1 && c_[0] == 0.0; }
  const std::vector<double>& coeffs() const { return c_; }
  double coeff(int k) const {
    return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[k] : 0.0;
  }
  double lead() const { return c_.back(); }

  double max_abs_coeff() const {
    double m = 0.0;
    for (double v : c_) m = std::max(m, std::abs(v));
    return m;
  }

  long double eval(long double x) const {
    long double acc = 0.0L;
    for (std::size_t k = c_.size(); k-- > 0;) acc = acc * x + c_[k];
    return acc;
  }
  double eval_d(double x) const {
    return static_cast<double>(eval(static_cast<long double>(x)));
  }

  std::complex<double> eval_c(std::complex<double> s) const {
    std::complex<long double> acc(0.0L, 0.0L);
    std::complex<long double> z(s.real(), s.imag());
    for (std::size_t k = c_.size(); k-- > 0;) acc = acc * z + (long double)c_[k];
    return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
  }

  Poly derivative() const {
    if (c_.size() == 1) return Poly();
    std::vector<double> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k)
      d[k - 1] = c_[k] * static_cast<double>(k);
    return Poly(std::move(d));
  }

  Poly scaled(double a) const {
    std::vector<double> d(c_);
    for (double& v : d) v *= a;
    return Poly(std::move(d));
  }

  // Drops every coefficient above maxdeg; used when the true degree is known
  // structurally and anything higher is numerical residue.
  void truncate_above(int maxdeg) {
    if (maxdeg < 0) maxdeg = 0;
    if (static_cast<int>(c_.size()) > maxdeg + 1) c_.resize(maxdeg + 1);
    if (c_.empty()) c_.push_back(0.0);
    trim();
  }

  friend Poly operator+(const Poly& p, const Poly& q) {
    std::vector<double> out(std::max(p.c_.size(), q.c_.size()), 0.0);
    for (std::size_t k = 0; k < out.size(); ++k)
      out[k] = p.coeff(static_cast<int>(k)) + q.coeff(static_cast<int>(k));
    return Poly(std::move(out));
  }

  friend Poly operator-(const Poly& p, const Poly& q) {
    std::vector<double> out(std::max(p.c_.size(), q.c_.size()), 0.0);
    for (std::size_t k = 0; k < out.size(); ++k)
      out[k] = p.coeff(static_cast<int>(k)) - q.coeff(static_cast<int>(k));
    return Poly(std::move(out));
  }

  friend Poly operator*(const Poly& p, const Poly& q) {
    if (p.is_zero() || q.is_zero()) return Poly();
    std::vector<long double> acc(p.c_.size() + q.c_.size() - 1, 0.0L);
    for (std::size_t i = 0; i < p.c_.size(); ++i) {
      if (p.c_[i] == 0.0) continue;
      for (std::size_t j = 0; j < q.c_.size(); ++j)
        acc[i + j] += static_cast<long double>(p.c_[i]) * q.c_[j];
    }
    std::vector<double> out(acc.size());
    for (std::size_t k = 0; k < acc.size(); ++k)
      out[k] = static_cast<double>(acc[k]);
    return Poly(std::move(out));
  }

  bool operator==(const Poly& o) const { return c_ == o.c_; }

 private:
  void trim() {
    while (c_.size() > 1 && c_.back() == 0.0) c_.pop_back();
  }

  std::vector<double> c_;
};

namespace detail {

// Positive rescaling only: preserves signs everywhere, hence Sturm counts.
inline Poly normalized(const Poly& p) {
  double m = p.max_abs_coeff();
  if (m == 0.0 || m == 1.0) return p;
  return p.scaled(1.0 / m);
}

// Remainder of a / b with long double accumulation.
inline Poly poly_rem(const Poly& a, const Poly& b) {
  const int db = b.degree();
  std::vector<long double> r(a.coeffs().begin(), a.coeffs().end());
  const std::vector<double>& bc = b.coeffs();
  const long double bl = bc[db];
  for (int k = static_cast<int>(r.size()) - 1; k >= db; --k) {
    const long double f = r[k] / bl;
    if (f != 0.0L)
      for (int j = 0; j < db; ++j) r[k - db + j] -= f * bc[j];
    r[k] = 0.0L;
  }
  r.resize(std::max(db, 1));
  std::vector<double> out(r.size());
  for (std::size_t k = 0; k < r.size(); ++k) out[k] = static_cast<double>(r[k]);
  return Poly(std::move(out));
}

struct SturmSequence {
  std::vector<Poly> seq;

  int sign_changes(long double x) const {
    int changes = 0;
    int prev = 0;
    for (const Poly& p : seq) {
      const long double v = p.eval(x);
      const int s = (v > 0.0L) - (v < 0.0L);
      if (s == 0) continue;
      if (prev != 0 && s != prev) ++changes;
      prev = s;
    }
    return changes;
  }
};

inline SturmSequence build_sturm(const Poly& p) {
  SturmSequence st;
  Poly p0 = normalized(p);
  if (p0.degree() == 0) {
    st.seq.push_back(p0);
    return st;
  }
  st.seq.push_back(p0);
  st.seq.push_back(normalized(p0.derivative()));
  // Each element is renormalized; a positive scale leaves sign counts alone.
  while (st.seq.back().degree() > 0) {
    Poly rem = poly_rem(st.seq[st.seq.size() - 2], st.seq.back());
    if (rem.max_abs_coeff() <= 1e-13) break;  // (near-)common factor: stop
    st.seq.push_back(normalized(rem.scaled(-1.0)));
  }
  return st;
}

// Fujiwara bound on root magnitudes.
inline long double root_magnitude_bound(const Poly& p) {
  const int d = p.degree();
  if (d <= 0) return 1.0L;
  const long double lead = std::abs(p.lead());
  long double b = 0.0L;
  for (int k = 0; k < d; ++k) {
    long double c = std::abs(static_cast<long double>(p.coeff(k))) / lead;
    if (c == 0.0L) continue;
    if (k == 0) c *= 0.5L;
    b = std::max(b, powl(c, 1.0L / (d - k)));
  }
  b *= 2.0L;
  return b > 0.0L ? b : 1.0L;
}

}  // namespace detail

// Real roots of p in [lo, hi], found by Sturm-count bisection.  Intervals
// are narrowed to width max(1e-12, |x|*1e-14); clustered roots collapse to
// one representative.  Intended for modest degrees; switch to poly_roots
// beyond that.
inline std::vector<double> real_roots_in(const Poly& p_in, double lo, double hi) {
  std::vector<double> out;
  Poly p = detail::normalized(p_in);
  if (p.degree() <= 0 || !(lo < hi)) return out;
  detail::SturmSequence st = detail::build_sturm(p);

  // Nudge the left end so a root exactly at lo is counted ((a, b] count).
  const double eps_lo = 1e-11 * std::max(1.0, std::abs(lo));
  const long double a0 = static_cast<long double>(lo) - eps_lo;
  const long double b0 = hi;
  struct Seg {
    long double a, b;
    int va, vb;
  };
  std::vector<Seg> stack;
  stack.push_back({a0, b0, st.sign_changes(a0), st.sign_changes(b0)});

  auto min_width = [](long double x) {
    return std::max(1e-12L, fabsl(x) * 1e-14L);
  };

  int guard = 0;
  while (!stack.empty() && ++guard < 200000) {
    Seg s = stack.back();
    stack.pop_back();
    const int count = s.va - s.vb;
    if (count <= 0) continue;
    const long double mid = 0.5L * (s.a + s.b);
    if (s.b - s.a <= min_width(mid)) {
      out.push_back(static_cast<double>(mid));
      continue;
    }
    const int vm = st.sign_changes(mid);
    stack.push_back({s.a, mid, s.va, vm});
    stack.push_back({mid, s.b, vm, s.vb});
  }
  std::sort(out.begin(), out.end());
  // Merge representatives of the same tight cluster.
  std::vector<double> merged;
  for (double r : out) {
    if (!merged.empty() &&
        std::abs(r - merged.back()) <= 4e-12 * std::max(1.0, std::abs(r)))
      continue;
    merged.push_back(r);
  }
  return merged;
}

// All complex roots via a balanced companion matrix + QR iteration, with a
// short guarded Newton polish.  Sorted by (re, im).
inline std::vector<std::complex<double>> poly_roots(const Poly& p_in) {
  Poly p = detail::normalized(p_in);
  std::vector<double> c = p.coeffs();
  int d = static_cast<int>(c.size()) - 1;
  // Effective degree: a relatively negligible leading coefficient would make
  // the companion matrix meaningless.
  while (d > 0 && std::abs(c[d]) < 1e-13) --d;
  if (d <= 0) return {};
  c.resize(d + 1);

  const Poly pe{std::vector<double>(c)};
  const long double sigma = detail::root_magnitude_bound(pe);

  // Monic coefficients of p(sigma * u).
  std::vector<long double> a(d);
  for (int k = 0; k < d; ++k)
    a[k] = static_cast<long double>(c[k]) * powl(sigma, k - d) / c[d];

  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(d, d);
  for (int i = 1; i < d; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) C(i, d - 1) = -static_cast<double>(a[i]);

  Eigen::EigenSolver<Eigen::MatrixXd> es(C, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw RootSolveError("companion QR iteration did not converge");

  const Poly dp = pe.derivative();
  auto horner = [](const std::complex<long double>& w, const Poly& q) {
    std::complex<long double> acc(0.0L, 0.0L);
    for (int k = q.degree(); k >= 0; --k) acc = acc * w + (long double)q.coeff(k);
    return acc;
  };
  std::vector<std::complex<double>> roots;
  roots.reserve(d);
  for (int i = 0; i < d; ++i) {
    std::complex<long double> z(es.eigenvalues()[i].real() * (double)sigma,
                                es.eigenvalues()[i].imag() * (double)sigma);
    // Polish only while the residual strictly shrinks.  Near a multiple root
    // both p and p' evaluate to roundoff noise, and the raw quotient can be a
    // sizable jump away from a perfectly good QR eigenvalue.
    std::complex<long double> f = horner(z, pe);
    for (int it = 0; it < 3; ++it) {
      const std::complex<long double> g = horner(z, dp);
      if (std::abs(g) == 0.0L) break;
      const std::complex<long double> step = f / g;
      if (!(std::abs(step) < 0.05L * (1.0L + std::abs(z)))) break;
      const std::complex<long double> zn = z - step;
      const std::complex<long double> fn = horner(zn, pe);
      if (!(std::abs(fn) < std::abs(f))) break;
      z = zn;
      f = fn;
    }
    roots.emplace_back(static_cast<double>(z.real()),
                       static_cast<double>(z.imag()));
  }
  std::sort(roots.begin(), roots.end(), [](const auto& u, const auto& v) {
    if (u.real() != v.real()) return u.real() < v.real();
    return u.imag() < v.imag();
  });
  return roots;
}

// Nonnegative real roots; Sturm bisection for modest degrees, companion
// otherwise (conjugate pairs with small imaginary parts are projected).
inline std::vector<double> real_nonneg_roots(const Poly& p) {
  if (p.degree() <= 0) return {};
  if (p.degree() <= 28) {
    const double hi =
        static_cast<double>(detail::root_magnitude_bound(detail::normalized(p)));
    return real_roots_in(p, 0.0, hi * (1.0 + 1e-9) + 1e-9);
  }
  std::vector<double> out;
  for (const auto& z : poly_roots(p)) {
    const double m = std::abs(z);
    if (std::abs(z.imag()) > 1e-7 * (1.0 + m)) continue;
    if (z.real() < -1e-9 * (1.0 + m)) continue;
    out.push_back(std::max(0.0, z.real()));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// |P(jw)|^2 expressed as a polynomial in x = w^2: split P into even part
// A(x) and odd part B(x) (alternating signs from j^k), then A^2 + x B^2.
inline Poly spectral_square(const Poly& p) {
  std::vector<double> ac, bc;
  for (int k = 0; k <= p.degree(); ++k) {
    const double v = p.coeff(k);
    if (k % 2 == 0) {
      const int e = k / 2;
      if (static_cast<int>(ac.size()) <= e) ac.resize(e + 1, 0.0);
      ac[e] = (e % 2 ? -v : v);
    } else {
      const int o = (k - 1) / 2;
      if (static_cast<int>(bc.size()) <= o) bc.resize(o + 1, 0.0);
      bc[o] = (o % 2 ? -v : v);
    }
  }
  const Poly A(ac.empty() ? std::vector<double>{0.0} : ac);
  const Poly B(bc.empty() ? std::vector<double>{0.0} : bc);
  return A * A + Poly(std::vector<double>{0.0, 1.0}) * (B * B);
}

}  // namespace secalloc
