#pragma once

// Stackelberg monitor placement.  The defender commits to a monitor set M
// drawn from a candidate collection; the adversary observes M and picks the
// attack vertex with the largest belief-weighted worst-case impact Q(a, M).
// The defender minimizes R(M) = c(|M|) + Q(a*(M), M) over the collection.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "secalloc/detail/parallel.hpp"
#include "secalloc/dynamics.hpp"
#include "secalloc/errors.hpp"
#include "secalloc/graph.hpp"
#include "secalloc/impact.hpp"

namespace secalloc {

// One fully evaluated defender option.
struct GameRow {
  MonitorSet m;
  int a_best = -1;   // adversary's preferred attack vertex against m
  ScalarImpact q;    // Q(a_best, m)
  ScalarImpact r;    // c(|m|) + Q, unbounded whenever Q is
};

struct GameSolution {
  MonitorSet best_monitor_set;
  int best_attack = -1;
  double r_star = 0.0;
  double q_star = 0.0;
  std::vector<GameRow> table;  // one row per candidate set, in collection order
};

namespace detail {

// Near-ties are resolved structurally so results do not depend on the last
// few bits of the impact values (symmetric graphs produce argmax sets whose
// members differ only by rounding noise).
constexpr double kTieTol = 1e-9;

inline double tie_scale(double reference) {
  return kTieTol * std::max(1.0, std::abs(reference));
}

}  // namespace detail

// Adversary's best response: the attack vertex maximizing Q(a, m_set).  An
// unbounded impact beats every bounded one; among equals the smallest vertex
// index wins.
inline std::pair<int, ScalarImpact> best_response(const ClosedLoopSystem& sys,
                                                  const MonitorSet& m_set,
                                                  const Belief& belief) {
  const int n = sys.n();
  int best = -1;
  ScalarImpact best_q = ScalarImpact::bounded(0.0);
  for (int a = 0; a < n; ++a) {
    const ScalarImpact q = expected_impact(sys, a, m_set, belief);
    if (!q.is_bounded()) return {a, q};  // nothing can beat it, lowest a wins
    if (best < 0 || q.value > best_q.value + detail::tie_scale(best_q.value)) {
      best = a;
      best_q = q;
    }
  }
  return {best, best_q};
}

// Full equilibrium over an explicit candidate collection.  Rows are computed
// independently (optionally across worker threads) but stored and reduced in
// collection order, so the result is identical for every worker count.
inline GameSolution solve_stackelberg(const ClosedLoopSystem& sys,
                                      const DominatingCollection& collection,
                                      const Belief& belief,
                                      const CostModel& cost, int workers = 1) {
  if (collection.sets.empty())
    throw EmptyCollection("no candidate monitor sets to evaluate");

  GameSolution sol;
  sol.table.resize(collection.sets.size());
  detail::parallel_for(collection.sets.size(), workers, [&](std::size_t i) {
    GameRow row;
    row.m = collection.sets[i];
    auto [a, q] = best_response(sys, row.m, belief);
    row.a_best = a;
    row.q = q;
    row.r = q.is_bounded() ? ScalarImpact::bounded(
                                 cost.cost(row.m.vertices.size()) + q.value)
                           : ScalarImpact::unbounded();
    sol.table[i] = std::move(row);
  });

  // Defender argmin over rows with bounded cost; ties prefer the smaller
  // leader cost, then fewer monitors, then the lexicographically smaller set.
  int win = -1;
  for (std::size_t i = 0; i < sol.table.size(); ++i) {
    const GameRow& row = sol.table[i];
    if (!row.r.is_bounded()) continue;
    if (win < 0) {
      win = static_cast<int>(i);
      continue;
    }
    const GameRow& w = sol.table[win];
    const double tol = detail::tie_scale(w.r.value);
    if (row.r.value < w.r.value - tol) {
      win = static_cast<int>(i);
    } else if (row.r.value <= w.r.value + tol) {
      if (row.m.vertices.size() < w.m.vertices.size() ||
          (row.m.vertices.size() == w.m.vertices.size() &&
           row.m.vertices < w.m.vertices))
        win = static_cast<int>(i);
    }
  }
  if (win < 0)
    throw InvalidScenario(
        "every candidate monitor set leaves the adversary unbounded");

  const GameRow& w = sol.table[win];
  sol.best_monitor_set = w.m;
  sol.best_attack = w.a_best;
  sol.r_star = w.r.value;
  sol.q_star = w.q.value;
  return sol;
}

inline GameSolution solve_stackelberg(const ClosedLoopSystem& sys,
                                      const DominatingCollection& collection,
                                      const CostModel& cost, int workers = 1) {
  return solve_stackelberg(sys, collection, Belief::uniform(), cost, workers);
}

// Independent equilibrium check: recomputes every impact and confirms both
// optimality conditions within a 1e-9 relative tolerance.  Returns false on
// the first violated condition rather than throwing.
inline bool verify_stackelberg(const GameSolution& sol,
                               const ClosedLoopSystem& sys,
                               const Belief& belief, const CostModel& cost,
                               int workers = 1) {
  constexpr double tol = 1e-9;
  const auto close = [](double a, double b) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
  };
  const int n = sys.n();
  if (sol.table.empty()) return false;

  std::atomic<bool> ok{true};
  detail::parallel_for(sol.table.size(), workers, [&](std::size_t i) {
    if (!ok.load(std::memory_order_relaxed)) return;
    const GameRow& row = sol.table[i];
    if (row.a_best < 0 || row.a_best >= n || row.m.vertices.empty()) {
      ok = false;
      return;
    }
    // Follower optimality: the recorded response is consistent and no other
    // attack vertex does strictly better.
    const ScalarImpact q = expected_impact(sys, row.a_best, row.m, belief);
    if (q.is_bounded() != row.q.is_bounded() ||
        (q.is_bounded() && !close(q.value, row.q.value))) {
      ok = false;
      return;
    }
    for (int a = 0; a < n && ok.load(std::memory_order_relaxed); ++a) {
      if (a == row.a_best) continue;
      const ScalarImpact qa = expected_impact(sys, a, row.m, belief);
      if (!qa.is_bounded()) {
        if (row.q.is_bounded()) ok = false;
        continue;
      }
      if (row.q.is_bounded() &&
          qa.value > row.q.value + tol * std::max(1.0, std::abs(qa.value)))
        ok = false;
    }
    // Leader cost bookkeeping for this row.
    if (row.q.is_bounded()) {
      const double r = cost.cost(row.m.vertices.size()) + row.q.value;
      if (!row.r.is_bounded() || !close(row.r.value, r)) ok = false;
    } else if (row.r.is_bounded()) {
      ok = false;
    }
  });
  if (!ok.load()) return false;

  // Leader optimality: the reported optimum appears in the table and no row
  // undercuts it.
  bool found = false;
  for (const GameRow& row : sol.table) {
    if (row.r.is_bounded() &&
        row.r.value < sol.r_star - tol * std::max(1.0, std::abs(row.r.value)))
      return false;
    if (row.m.vertices == sol.best_monitor_set.vertices) {
      if (row.a_best != sol.best_attack || !row.r.is_bounded() ||
          !close(row.r.value, sol.r_star) || !row.q.is_bounded() ||
          !close(row.q.value, sol.q_star))
        return false;
      found = true;
    }
  }
  if (!found) return false;
  return close(sol.r_star,
               cost.cost(sol.best_monitor_set.vertices.size()) + sol.q_star);
}

}  // namespace secalloc
