#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "secalloc/detail/simplex.hpp"
#include "secalloc/dynamics.hpp"
#include "secalloc/errors.hpp"
#include "secalloc/graph.hpp"
#include "secalloc/polynomial.hpp"

namespace secalloc {

enum class ImpactStatus { Bounded, Unbounded };

// |G_(out,a)(jw)|^2 numerator as a polynomial in x = w^2.
struct SpectralDensity {
  int out = 0;
  int a = 0;
  Poly poly;
};

inline SpectralDensity spectral_density(const ClosedLoopSystem& sys, int out,
                                        int a) {
  const int n = sys.n();
  if (out < 0 || out >= n || a < 0 || a >= n)
    throw InvalidScenario("vertex out of range");
  const std::pair<int, int> key{std::min(out, a), std::max(out, a)};
  {
    std::lock_guard<std::mutex> lk(sys.memo->mx);
    auto it = sys.memo->densities.find(key);
    if (it != sys.memo->densities.end()) return {out, a, it->second};
  }
  Poly r = spectral_square(numerator(sys, out, a));
  std::lock_guard<std::mutex> lk(sys.memo->mx);
  auto [it, inserted] = sys.memo->densities.emplace(key, std::move(r));
  return {out, a, it->second};
}

struct ImpactResult {
  ImpactStatus status = ImpactStatus::Bounded;
  double value = 0.0;                 // sum gamma_m delta_m, bounded only
  std::vector<int> monitors;          // sorted vertices the gammas refer to
  std::vector<double> gamma;          // aligned with monitors
  Poly certificate;                   // sum gamma_m R_m - R_rho
  double certificate_min = 0.0;       // verified min over x >= 0
  // Frequency (rad/s) at which a single-frequency attack attains the value
  // under every alarm cap; infinity when only the frequency tail, or a mix
  // of frequencies, attains it.
  double worst_frequency = 0.0;
  bool is_bounded() const { return status == ImpactStatus::Bounded; }

  static ImpactResult make_unbounded(std::vector<int> ms) {
    ImpactResult r;
    r.status = ImpactStatus::Unbounded;
    r.monitors = std::move(ms);
    return r;
  }
};

// Scalar outcome for aggregated quantities where only the number survives.
struct ScalarImpact {
  ImpactStatus status = ImpactStatus::Bounded;
  double value = 0.0;
  bool is_bounded() const { return status == ImpactStatus::Bounded; }
  static ScalarImpact bounded(double v) { return {ImpactStatus::Bounded, v}; }
  static ScalarImpact unbounded() { return {ImpactStatus::Unbounded, 0.0}; }
};

// Attacker's conditional target distribution pi_a(rho).
class Belief {
 public:
  static Belief uniform() { return Belief(); }

  // rows[a][rho]; every row must be a probability vector that places zero
  // mass on its own index and strictly positive mass everywhere else.
  static Belief table(std::vector<std::vector<double>> rows) {
    const std::size_t n = rows.size();
    if (n == 0) throw SchemaError("belief table is empty");
    for (std::size_t a = 0; a < n; ++a) {
      if (rows[a].size() != n)
        throw SchemaError("belief table is not square");
      long double sum = 0.0L;
      for (std::size_t rho = 0; rho < n; ++rho) {
        const double p = rows[a][rho];
        if (!std::isfinite(p)) throw SchemaError("belief entry is not finite");
        if (rho == a) {
          if (std::abs(p) > 1e-12)
            throw SchemaError("belief places mass on the attack vertex");
          continue;
        }
        if (p <= 0.0)
          throw SchemaError("belief entries off the diagonal must be positive");
        sum += p;
      }
      if (std::abs(static_cast<double>(sum) - 1.0) > 1e-12)
        throw SchemaError("belief row does not sum to one");
    }
    Belief b;
    b.uniform_ = false;
    b.rows_ = std::move(rows);
    return b;
  }

  bool is_uniform() const { return uniform_; }

  double prob(const Network& net, int a, int rho) const {
    if (a == rho) return 0.0;
    if (uniform_) return 1.0 / static_cast<double>(net.n - 1);
    if (rows_.size() != static_cast<std::size_t>(net.n))
      throw SchemaError("belief table size does not match the network");
    return rows_[a][rho];
  }

 private:
  bool uniform_ = true;
  std::vector<std::vector<double>> rows_;
};

// Linear sensing cost c(|M|) = kappa * |M|.
struct CostModel {
  double kappa = 0.0;
  static CostModel linear(double kappa) {
    if (!(kappa >= 0.0) || !std::isfinite(kappa))
      throw SchemaError("sensor cost must be a nonnegative finite number");
    return {kappa};
  }
  double cost(std::size_t monitor_count) const {
    return kappa * static_cast<double>(monitor_count);
  }
};

inline ImpactStatus boundedness(const ClosedLoopSystem& sys, int a, int rho,
                                const MonitorSet& m_set) {
  if (a < 0 || a >= sys.n() || rho < 0 || rho >= sys.n())
    throw InvalidScenario("vertex out of range");
  if (rho == a)
    throw InvalidScenario("attack and target vertices coincide");
  if (m_set.vertices.empty()) throw InvalidScenario("no monitors selected");
  const int r_rho = relative_degree(sys, rho, a);
  int r_min = std::numeric_limits<int>::max();
  for (int m : m_set.vertices) r_min = std::min(r_min, relative_degree(sys, m, a));
  return r_min <= r_rho ? ImpactStatus::Bounded : ImpactStatus::Unbounded;
}

namespace detail {

constexpr double kGammaFloor = 1e-9;
constexpr int kMaxCuts = 200;
constexpr int kSeedDegreeCap = 31;  // stationary-seed root solves above this

inline long double eval_ld(const Poly& p, long double x) {
  long double acc = 0.0L;
  for (int k = p.degree(); k >= 0; --k) acc = acc * x + (long double)p.coeff(k);
  return acc;
}

// 0 together with a fixed log-spaced grid; every run sees the same points.
inline std::vector<double> initial_grid() {
  std::vector<double> xs;
  xs.reserve(65);
  xs.push_back(0.0);
  for (int i = 0; i < 64; ++i)
    xs.push_back(std::pow(10.0, -6.0 + 12.0 * i / 63.0));
  return xs;
}

// Stationary points of f/g on x >= 0: nonnegative roots of f'g - fg'.
inline void ratio_stationary_points(const Poly& f, const Poly& g,
                                    std::vector<double>& out) {
  const Poly w = f.derivative() * g - f * g.derivative();
  if (w.degree() > kSeedDegreeCap || w.is_zero()) return;
  for (double x : real_nonneg_roots(w)) out.push_back(x);
}

// Nonnegative real parts of the roots, tuned for candidate generation: the
// consumers only evaluate at these points, so over-inclusion is free and a
// generous imaginary-part tolerance beats dropping an ill-conditioned root.
inline std::vector<double> loose_nonneg_roots(const Poly& p) {
  if (p.degree() <= 0) return {};
  if (p.degree() <= 28) return real_nonneg_roots(p);
  std::vector<double> out;
  for (const auto& z : poly_roots(p)) {
    const double m = std::abs(z);
    if (std::abs(z.imag()) > 1e-3 * (1.0 + m)) continue;
    if (z.real() < -1e-9 * (1.0 + m)) continue;
    out.push_back(std::max(0.0, z.real()));
  }
  return out;
}

struct CertificateMin {
  long double min_value;
  double argmin;
};

// Global minimum of p over x >= 0 via the stationary points of p', a dense
// log-spaced sweep, the left endpoint, and deep-tail probes.  Probes are
// capped so that the evaluation stays inside long double exponent range:
// coefficients of spectral-density differences reach 1e130 and beyond, and
// a probe past the cap would only produce an uninformative infinity.
inline CertificateMin certificate_minimum(const Poly& p) {
  const int d = std::max(1, p.degree());
  const double log2c = std::log2(std::max(p.max_abs_coeff(), 1.0));
  const double x_cap = std::pow(2.0, (16000.0 - log2c) / d);

  std::vector<double> cand{0.0, std::min(1e7, x_cap), std::min(1e9, x_cap)};
  if (p.lead() < 0.0 && p.degree() >= 1) {
    // Negative tail: probe past the point where the leading term dominates.
    cand.push_back(std::min(
        2.0 * p.max_abs_coeff() / std::abs(p.lead()) + 1.0, x_cap));
  }
  for (int i = 0; i < 160; ++i) {
    const double x = std::pow(10.0, -6.0 + 16.0 * i / 159.0);
    if (x <= x_cap) cand.push_back(x);
  }
  if (p.degree() >= 2)
    for (double x : loose_nonneg_roots(p.derivative()))
      if (x <= x_cap) cand.push_back(x);
  std::sort(cand.begin(), cand.end());
  CertificateMin best{std::numeric_limits<long double>::infinity(), 0.0};
  for (double x : cand) {
    const long double v = eval_ld(p, x);
    if (std::isnan(static_cast<double>(v))) continue;  // pathological probe
    if (v < best.min_value) {
      best.min_value = v;
      best.argmin = x;
    }
  }
  return best;
}

// Frequency (in x = omega^2) where a single-frequency attack delivers a
// required value: the deliverable curve is v(x) = R_rho(x) * min_m delta_m /
// R_m(x), the largest target energy a sinusoid at x can cause before some
// monitor alarms.  Degenerate optima leave the certificate flat, so its
// argmin can land on noise; this checks the argmin actually delivers and
// otherwise sweeps the band up to ten times the system's spectral radius.
// Beyond that band every density sits in its asymptotic regime, so a hit
// there is indistinguishable from the tail: report infinity instead.
inline double binding_frequency(const Poly& r_rho, const std::vector<Poly>& r_ms,
                                const std::vector<double>& deltas, double value,
                                double hint, double lambda_max) {
  const auto deliver = [&](double x) -> long double {
    const long double rr = eval_ld(r_rho, x);
    if (!(rr > 0.0L)) return 0.0L;
    long double cap = std::numeric_limits<long double>::infinity();
    for (std::size_t i = 0; i < r_ms.size(); ++i) {
      const long double rm = eval_ld(r_ms[i], x);
      if (rm > 0.0L) cap = std::min(cap, (long double)deltas[i] / rm);
    }
    if (std::isinf(static_cast<double>(cap))) return 0.0L;
    return rr * cap;
  };
  const long double goal = (1.0L - 1e-6L) * (long double)value;
  const double x_band = std::pow(10.0 * std::max(1.0, lambda_max), 2);
  if (hint <= x_band && deliver(hint) >= goal)
    return std::sqrt(std::max(0.0, hint));

  double best_x = 0.0;
  long double best_v = deliver(0.0);
  const double lo_x = 1e-6;
  const double step = std::pow(x_band / lo_x, 1.0 / 199.0);
  for (int i = 1; i < 200; ++i) {
    const double x = lo_x * std::pow(step, i);
    const long double v = deliver(x);
    if (v > best_v) {
      best_v = v;
      best_x = x;
    }
  }
  if (best_x > 0.0) {
    // Golden-section polish on log x inside the bracketing grid cells.
    double lo = std::log(best_x / step);
    double hi = std::log(std::min(best_x * step, x_band));
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - gr * (hi - lo);
    double d = lo + gr * (hi - lo);
    long double fc = deliver(std::exp(c));
    long double fd = deliver(std::exp(d));
    for (int it = 0; it < 80; ++it) {
      if (fc > fd) {
        hi = d; d = c; fd = fc;
        c = hi - gr * (hi - lo);
        fc = deliver(std::exp(c));
      } else {
        lo = c; c = d; fc = fd;
        d = lo + gr * (hi - lo);
        fd = deliver(std::exp(d));
      }
    }
    const double xm = std::exp(0.5 * (lo + hi));
    if (deliver(xm) > best_v) {
      best_v = deliver(xm);
      best_x = xm;
    }
  }
  if (best_v >= goal) return std::sqrt(best_x);
  return std::numeric_limits<double>::infinity();
}

}  // namespace detail

// Tight upper bound from a single monitor: delta_m * sup_x R_rho(x)/R_m(x).
inline ImpactResult single_monitor_bound(const ClosedLoopSystem& sys, int a,
                                         int rho, int m, double delta_m) {
  if (rho == a)
    throw InvalidScenario("attack and target vertices coincide");
  if (!(delta_m > 0.0) || !std::isfinite(delta_m))
    throw InvalidScenario("alarm threshold must be positive");
  if (relative_degree(sys, m, a) > relative_degree(sys, rho, a))
    return ImpactResult::make_unbounded({m});

  const Poly r_rho = spectral_density(sys, rho, a).poly;
  const Poly r_m = spectral_density(sys, m, a).poly;

  std::vector<double> cand{0.0};
  if (r_rho.degree() + r_m.degree() <= 2 * detail::kSeedDegreeCap) {
    detail::ratio_stationary_points(r_rho, r_m, cand);
  } else {
    // High degree: dense log sweep, then golden-section polish of the best
    // bracket.  2048 points resolve ratio peaks a few percent wide, the
    // narrowest the tuned damping margin leaves possible.
    for (int i = 0; i < 2048; ++i)
      cand.push_back(std::pow(10.0, -8.0 + 16.0 * i / 2047.0));
  }
  std::sort(cand.begin(), cand.end());

  auto ratio_at = [&](long double x) -> long double {
    const long double den = detail::eval_ld(r_m, x);
    if (!(den > 0.0L)) return std::numeric_limits<long double>::infinity();
    return detail::eval_ld(r_rho, x) / den;
  };

  long double sup = 0.0L;
  double arg = 0.0;
  for (std::size_t i = 0; i < cand.size(); ++i) {
    const long double v = ratio_at(cand[i]);
    if (v > sup) {
      sup = v;
      arg = cand[i];
    }
  }
  if (cand.size() > 8) {
    // Polish around the best sweep point.
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < cand.size(); ++i)
      if (ratio_at(cand[i]) == sup) best_i = i;
    double lo = cand[best_i > 0 ? best_i - 1 : 0];
    double hi = cand[std::min(best_i + 1, cand.size() - 1)];
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    for (int it = 0; it < 120 && hi - lo > 1e-13 * (1.0 + hi); ++it) {
      if (ratio_at(x1) < ratio_at(x2)) {
        lo = x1;
        x1 = x2;
        x2 = lo + gr * (hi - lo);
      } else {
        hi = x2;
        x2 = x1;
        x1 = hi - gr * (hi - lo);
      }
    }
    const double mid = 0.5 * (lo + hi);
    if (ratio_at(mid) > sup) {
      sup = ratio_at(mid);
      arg = mid;
    }
  }
  // Tail limit: equal degrees leave a finite ratio at infinity.  The margin
  // keeps the certificate's leading coefficient strictly positive after the
  // coefficient arithmetic rounds.
  bool tail_active = false;
  if (r_m.degree() == r_rho.degree()) {
    const long double tail =
        (long double)r_rho.lead() / r_m.lead() * (1.0L + 1e-12L);
    if (tail > sup) {
      sup = tail;
      tail_active = true;
    }
  }
  if (std::isinf((double)sup))
    return ImpactResult::make_unbounded({m});  // monitor blind at some x

  ImpactResult res;
  res.status = ImpactStatus::Bounded;
  res.monitors = {m};
  res.gamma = {static_cast<double>(sup)};
  res.value = delta_m * static_cast<double>(sup);
  res.certificate = r_m.scaled(static_cast<double>(sup)) - r_rho;
  const detail::CertificateMin cm = detail::certificate_minimum(res.certificate);
  res.certificate_min = static_cast<double>(cm.min_value);
  res.worst_frequency =
      tail_active ? std::numeric_limits<double>::infinity() : std::sqrt(arg);
  return res;
}

// Worst-case stealthy-attack impact on target rho: the semi-infinite program
//   min sum_m gamma_m delta_m   s.t.   sum_m gamma_m R_m(x) >= R_rho(x)
// for all x >= 0, gamma_m >= kGammaFloor, solved by cutting planes with a
// polynomial nonnegativity certificate at every accepted solution.
inline ImpactResult worst_case_impact(const ClosedLoopSystem& sys, int a,
                                      int rho, const MonitorSet& m_set) {
  if (boundedness(sys, a, rho, m_set) == ImpactStatus::Unbounded)
    return ImpactResult::make_unbounded(m_set.vertices);

  const int k = static_cast<int>(m_set.vertices.size());
  const Poly r_rho = spectral_density(sys, rho, a).poly;
  std::vector<Poly> r_ms;
  std::vector<double> deltas;
  r_ms.reserve(k);
  for (int m : m_set.vertices) {
    r_ms.push_back(spectral_density(sys, m, a).poly);
    deltas.push_back(sys.net.delta[m]);
  }

  std::vector<double> xs = detail::initial_grid();
  if (sys.n() <= 16) {
    for (int i = 0; i < k; ++i) {
      detail::ratio_stationary_points(r_rho, r_ms[i], xs);
      for (int j = i + 1; j < k; ++j)
        detail::ratio_stationary_points(r_ms[i], r_ms[j], xs);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  }

  int deg_max = 0;
  for (const Poly& r : r_ms) deg_max = std::max(deg_max, r.degree());

  ImpactResult res;
  res.monitors = m_set.vertices;
  for (int cut = 0; cut < detail::kMaxCuts; ++cut) {
    std::vector<std::vector<double>> A;
    std::vector<double> b;
    A.reserve(xs.size() + 1);
    for (double x : xs) {
      std::vector<long double> row(k);
      long double rhs = detail::eval_ld(r_rho, x);
      long double scale = std::abs(rhs);
      for (int i = 0; i < k; ++i) {
        row[i] = detail::eval_ld(r_ms[i], x);
        rhs -= detail::kGammaFloor * row[i];
        scale = std::max(scale, std::abs(row[i]));
      }
      if (!(scale > 0.0L)) continue;
      std::vector<double> rowd(k);
      bool finite = std::isfinite((double)(rhs / scale));
      for (int i = 0; i < k; ++i) {
        rowd[i] = (double)(row[i] / scale);
        finite = finite && std::isfinite(rowd[i]);
      }
      if (!finite) continue;  // evaluation point beyond representable range
      A.push_back(std::move(rowd));
      b.push_back((double)(rhs / scale));
    }
    if (deg_max == r_rho.degree()) {
      // Leading-coefficient constraint keeps the tail nonnegative.
      std::vector<long double> row(k, 0.0L);
      long double rhs = r_rho.lead();
      long double scale = std::abs(rhs);
      for (int i = 0; i < k; ++i) {
        if (r_ms[i].degree() != deg_max) continue;
        row[i] = r_ms[i].lead();
        rhs -= detail::kGammaFloor * row[i];
        scale = std::max(scale, std::abs(row[i]));
      }
      std::vector<double> rowd(k);
      for (int i = 0; i < k; ++i) rowd[i] = (double)(row[i] / scale);
      A.push_back(std::move(rowd));
      b.push_back((double)(rhs / scale));
    }

    const detail::LpResult lp = detail::solve_lp_min_ge(deltas, A, b);
    if (lp.status == detail::LpStatus::Infeasible)
      return ImpactResult::make_unbounded(m_set.vertices);
    if (lp.status != detail::LpStatus::Optimal)
      throw NumericalError("impact restriction program did not solve");

    std::vector<double> gamma(k);
    for (int i = 0; i < k; ++i) gamma[i] = lp.x[i] + detail::kGammaFloor;

    if (deg_max == r_rho.degree()) {
      // Rounding through the solver can leave the leading coefficient of the
      // certificate an ulp short, which the tail then amplifies without
      // bound; no pointwise cut can repair that.  Raising a gamma is always
      // feasible (the densities are nonnegative), so project the solution
      // onto the tail constraint with a strict relative margin.
      long double have = 0.0L;
      double best_lead = 0.0;
      int bi = -1;
      for (int i = 0; i < k; ++i) {
        if (r_ms[i].degree() != deg_max) continue;
        have += (long double)gamma[i] * r_ms[i].lead();
        if (r_ms[i].lead() > best_lead) {
          best_lead = r_ms[i].lead();
          bi = i;
        }
      }
      const long double need =
          (long double)r_rho.lead() * (1.0L + 1e-12L);
      if (bi >= 0 && have < need)
        gamma[bi] += static_cast<double>((need - have) / best_lead);
    }

    Poly cert = r_ms[0].scaled(gamma[0]);
    for (int i = 1; i < k; ++i) cert = cert + r_ms[i].scaled(gamma[i]);
    cert = cert - r_rho;

    const detail::CertificateMin cm = detail::certificate_minimum(cert);
    long double covered = 0.0L;
    for (int i = 0; i < k; ++i)
      covered += (long double)gamma[i] * detail::eval_ld(r_ms[i], cm.argmin);
    const long double scale_pt = std::max(
        {fabsl(detail::eval_ld(r_rho, cm.argmin)), fabsl(covered), 1.0L});
    if (cm.min_value >= -1e-9L * scale_pt) {
      res.status = ImpactStatus::Bounded;
      res.gamma = gamma;
      res.value = 0.0;
      long double v = 0.0L;
      for (int i = 0; i < k; ++i)
        v += (long double)gamma[i] * (long double)deltas[i];
      res.value = static_cast<double>(v);
      res.certificate = std::move(cert);
      res.certificate_min = static_cast<double>(cm.min_value);
      res.worst_frequency = detail::binding_frequency(
          r_rho, r_ms, deltas, res.value, cm.argmin, sys.norm);
      return res;
    }
    xs.push_back(std::min(cm.argmin, 1e15));  // clamp pathological tail cuts
  }
  throw IterationLimit("no certificate within the cutting-plane budget");
}

// Q(a, M): belief-weighted worst-case impact over every possible target.
inline ScalarImpact expected_impact(const ClosedLoopSystem& sys, int a,
                                    const MonitorSet& m_set,
                                    const Belief& belief) {
  const int n = sys.n();
  if (a < 0 || a >= n) throw InvalidScenario("attack vertex out of range");
  long double q = 0.0L;
  for (int rho = 0; rho < n; ++rho) {
    if (rho == a) continue;
    const ImpactResult j = worst_case_impact(sys, a, rho, m_set);
    if (!j.is_bounded()) return ScalarImpact::unbounded();
    q += (long double)belief.prob(sys.net, a, rho) * (long double)j.value;
  }
  return ScalarImpact::bounded(static_cast<double>(q));
}

// R(a, M) = c(|M|) + Q(a, M).
inline ScalarImpact defense_cost(const ClosedLoopSystem& sys, int a,
                                 const MonitorSet& m_set, const Belief& belief,
                                 const CostModel& cost) {
  const ScalarImpact q = expected_impact(sys, a, m_set, belief);
  if (!q.is_bounded()) return q;
  return ScalarImpact::bounded(cost.cost(m_set.vertices.size()) + q.value);
}

}  // namespace secalloc
