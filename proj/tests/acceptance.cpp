// Acceptance gate for the sensor-placement library.  Each criterion prints
// exactly one [PASS]/[FAIL] line; the process exits nonzero when any fails.
// Every check here is against an independent restatement of the claim —
// definition scans, dense frequency sweeps, finite-horizon restrictions,
// literal brute force — never against the code under test itself.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "secalloc/experiments.hpp"
#include "secalloc/game.hpp"
#include "secalloc/graph.hpp"
#include "secalloc/impact.hpp"
#include "secalloc/json_io.hpp"
#include "secalloc/oracle.hpp"

using namespace secalloc;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    ok = false;
    if (detail.empty()) detail = why;  // keep the first failure
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Network p3() {
  return Network::create(3, {{0, 1}, {1, 2}}, std::vector<double>(3, 0.5),
                         std::vector<double>(3, 1.0));
}

MonitorSet monitors(const Network& net, std::vector<int> vs) {
  const int budget = static_cast<int>(vs.size());
  return MonitorSet::make(net, std::move(vs), budget);
}

// ---- 1. candidate counting and enumeration against the definition --------

Outcome criterion_counting() {
  Outcome out;
  std::uint64_t count = 0;
  const auto t0 = Clock::now();
  count = subset_count(50, 3);
  const double count_time = seconds_since(t0);
  if (count != 20875) out.fail("subset_count(50,3) = " + std::to_string(count));
  if (count_time >= 1e-3) out.fail("subset_count took too long");

  std::mt19937_64 rng(11u);
  for (int g = 0; g < 200 && out.ok; ++g) {
    const int n = 4 + static_cast<int>(rng() % 9);  // 4..12
    const int n_s = 1 + static_cast<int>(rng() % 3);
    const Network net = generate_erdos_renyi(n, 0.5, rng());
    std::set<std::vector<int>> expected;
    detail::for_each_subset(net.n, std::min(n_s, n),
                            [&](const std::vector<int>& s) {
                              if (dominating_oracle(net, s)) expected.insert(s);
                            });
    std::set<std::vector<int>> got;
    try {
      const auto collection = enumerate_dominating_sets(net, n_s);
      for (const auto& m : collection.sets) got.insert(m.vertices);
    } catch (const EmptyCollection&) {
      // enumeration reports emptiness by exception; the oracle must agree
    }
    if (got != expected)
      out.fail("enumeration mismatch on graph " + std::to_string(g));
  }
  return out;
}

// ---- 2. channel delay equals hop distance plus one ------------------------

Outcome criterion_relative_degree() {
  Outcome out;
  std::mt19937_64 rng(23u);
  for (int g = 0; g < 100 && out.ok; ++g) {
    const int n = 3 + static_cast<int>(rng() % 8);  // 3..10
    const Network net = generate_erdos_renyi(n, 0.5, rng());
    const ClosedLoopSystem sys = build_system(net);

    // Independent BFS, not the library's cached distance table.
    std::vector<std::vector<int>> adj(n);
    for (const auto& [u, v] : net.edges) {
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
    for (int a = 0; a < n && out.ok; ++a) {
      std::vector<int> dist(n, -1);
      std::queue<int> bfs;
      dist[a] = 0;
      bfs.push(a);
      while (!bfs.empty()) {
        const int u = bfs.front();
        bfs.pop();
        for (int v : adj[u])
          if (dist[v] < 0) {
            dist[v] = dist[u] + 1;
            bfs.push(v);
          }
      }
      // Independent Markov-parameter scan on the raw system matrix.
      Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
      v(a) = 1.0;
      std::vector<int> first_nonzero(n, -1);
      double scale = 1.0;
      for (int k = 0; k < n; ++k) {
        for (int m = 0; m < n; ++m)
          if (first_nonzero[m] < 0 && std::abs(v(m)) > 1e-8 * scale)
            first_nonzero[m] = k;
        v = (-sys.lbar * v).eval();
        scale *= std::max(1.0, sys.norm);
      }
      for (int m = 0; m < n && out.ok; ++m) {
        const int lib = relative_degree(sys, m, a);
        if (lib != dist[m] + 1 || lib != first_nonzero[m] + 1)
          out.fail("delay mismatch at n=" + std::to_string(n));
      }
    }
  }
  return out;
}

// ---- 3. analytic impact values -------------------------------------------

Outcome criterion_impact_analytic() {
  Outcome out;
  const ClosedLoopSystem sys = build_system(p3());
  const ImpactResult far_monitor =
      worst_case_impact(sys, 0, 2, monitors(sys.net, {1}));
  if (!far_monitor.is_bounded() ||
      std::abs(far_monitor.value - 4.0 / 9.0) > 1e-6 * (4.0 / 9.0))
    out.fail("middle-monitor value off the analytic 4/9");
  const ImpactResult at_attack =
      worst_case_impact(sys, 0, 2, monitors(sys.net, {0}));
  if (!at_attack.is_bounded() ||
      std::abs(at_attack.value - 1.0 / 7.5625) > 1e-6 * (1.0 / 7.5625))
    out.fail("attack-site monitor value off the analytic 1/7.5625");

  // Monitoring the target caps the impact at exactly its threshold.
  std::mt19937_64 rng(37u);
  for (int k = 0; k < 50 && out.ok; ++k) {
    const int n = 3 + static_cast<int>(rng() % 5);
    Network base = generate_erdos_renyi(n, 0.6, rng());
    std::vector<double> delta(n);
    for (double& d : delta)
      d = 0.5 + 2.0 * (static_cast<double>(rng() % 1000) / 1000.0);
    const Network net = Network::create(n, base.edges, base.theta, delta);
    const ClosedLoopSystem s = build_system(net);
    const int a = static_cast<int>(rng() % n);
    int rho = static_cast<int>(rng() % n);
    if (rho == a) rho = (rho + 1) % n;
    const ImpactResult self = worst_case_impact(s, a, rho, monitors(net, {rho}));
    if (!self.is_bounded() ||
        std::abs(self.value - delta[rho]) > 1e-9 * delta[rho])
      out.fail("self-monitor impact differs from the threshold");
  }
  return out;
}

// ---- 4. certified values against the independent oracles ------------------

Outcome criterion_impact_oracle() {
  Outcome out;
  std::mt19937_64 rng(101u);
  int singles = 0;
  int pairs = 0;
  for (int g = 0; g < 20; ++g) {
    const int n = 4 + static_cast<int>(rng() % 3);  // 4..6
    const Network net = generate_erdos_renyi(n, 0.5, rng());
    const ClosedLoopSystem sys = build_system(net);
    for (int a = 0; a < n; ++a)
      for (int rho = 0; rho < n; ++rho) {
        if (rho == a) continue;
        const int r_rho = relative_degree(sys, rho, a);
        for (int m = 0; m < n; ++m) {
          if (relative_degree(sys, m, a) > r_rho) continue;
          const ImpactResult lp =
              worst_case_impact(sys, a, rho, monitors(net, {m}));
          if (!lp.is_bounded()) {
            out.fail("admissible single monitor reported unbounded");
            continue;
          }
          const double sweep =
              sweep_ratio_oracle(sys, a, rho, m, net.delta[m], 20000);
          if (std::abs(sweep - lp.value) > 5e-3 * std::max(lp.value, 1e-12))
            out.fail("sweep disagrees with the certified value");
          ++singles;
        }
        // Two-monitor scenarios against the finite-horizon restriction.
        // Hold-shaped inputs cannot chase a supremum that is only reached
        // in the frequency tail, so draws are limited to scenarios whose
        // certificate binds at a finite, moderate frequency.
        if (pairs >= 20) continue;
        for (int m1 = 0; m1 < n && pairs < 20; ++m1) {
          if (relative_degree(sys, m1, a) > r_rho) continue;
          for (int m2 = m1 + 1; m2 < n && pairs < 20; ++m2) {
            if (relative_degree(sys, m2, a) > r_rho) continue;
            const MonitorSet pair = monitors(net, {m1, m2});
            const ImpactResult lp = worst_case_impact(sys, a, rho, pair);
            if (!lp.is_bounded() || !(lp.worst_frequency < 50.0)) continue;
            const auto problem = make_discretized_problem(sys, a, rho, pair);
            const double disc = discretized_impact_oracle(
                problem, {net.delta[m1], net.delta[m2]});
            if (std::abs(disc - lp.value) > 0.05 * lp.value)
              out.fail("two-monitor restriction disagrees beyond 5%");
            ++pairs;
          }
        }
      }
  }
  if (singles < 100) out.fail("too few single-monitor scenarios exercised");
  if (pairs < 20) out.fail("too few two-monitor scenarios exercised");
  return out;
}

// ---- 5 & 6. boundedness dichotomies and monitor monotonicity --------------

struct Criteria56 {
  Outcome boundedness;
  Outcome monotonicity;
};

Criteria56 criteria_boundedness_and_monotonicity() {
  Criteria56 out;
  std::mt19937_64 rng(301u);
  for (int g = 0; g < 20; ++g) {
    const int n = 4 + static_cast<int>(rng() % 4);  // 4..7
    const Network net = generate_erdos_renyi(n, 0.5, rng());
    const ClosedLoopSystem sys = build_system(net);

    std::vector<std::vector<int>> sets;
    detail::for_each_subset(n, 2, [&](const std::vector<int>& s) {
      sets.push_back(s);
    });

    // J for every (a, rho, M with |M| <= 2), keyed by monitor bitmask;
    // unbounded recorded as infinity.
    std::map<std::tuple<int, int, int>, double> value;
    const auto mask_of = [](const std::vector<int>& vs) {
      int m = 0;
      for (int v : vs) m |= 1 << v;
      return m;
    };
    for (const auto& vs : sets) {
      const MonitorSet m_set = monitors(net, vs);
      for (int a = 0; a < n; ++a) {
        int best_r = n + 2;
        for (int v : vs) best_r = std::min(best_r, relative_degree(sys, v, a));
        for (int rho = 0; rho < n; ++rho) {
          if (rho == a) continue;
          const ImpactResult res = worst_case_impact(sys, a, rho, m_set);
          const bool should_bound = best_r <= relative_degree(sys, rho, a);
          if (res.is_bounded() != should_bound)
            out.boundedness.fail("delay test disagrees with the program");
          value[{a, rho, mask_of(vs)}] =
              res.is_bounded() ? res.value
                               : std::numeric_limits<double>::infinity();
        }
      }
    }

    // Monitoring everywhere relevant is finite exactly for dominating sets.
    for (const auto& vs : sets) {
      const bool dom = dominating_oracle(net, vs);
      bool all_finite = true;
      for (int a = 0; a < n && all_finite; ++a)
        for (int rho = 0; rho < n; ++rho) {
          if (rho == a) continue;
          if (std::isinf(value[{a, rho, mask_of(vs)}])) {
            all_finite = false;
            break;
          }
        }
      if (dom != all_finite)
        out.boundedness.fail("coverage does not match finiteness");
    }

    // A pair is never worse than its best member, and growing a set never
    // raises the certified impact.
    for (const auto& vs : sets) {
      if (vs.size() != 2) continue;
      for (int a = 0; a < n; ++a)
        for (int rho = 0; rho < n; ++rho) {
          if (rho == a) continue;
          const double joint = value[{a, rho, mask_of(vs)}];
          const double best_single =
              std::min(value[{a, rho, 1 << vs[0]}],
                       value[{a, rho, 1 << vs[1]}]);
          if (std::isinf(joint)) continue;  // covered by the dichotomy check
          if (joint > best_single + 1e-6)
            out.monotonicity.fail("pair beat by its own member");
        }
    }
  }
  return out;
}

// ---- 7. game solver against literal brute force ---------------------------

GameSolution brute_force(const ClosedLoopSystem& sys,
                         const DominatingCollection& collection,
                         const Belief& belief, const CostModel& cost) {
  GameSolution sol;
  for (const MonitorSet& m : collection.sets) {
    GameRow row;
    row.m = m;
    for (int a = 0; a < sys.n(); ++a) {
      const ScalarImpact q = expected_impact(sys, a, m, belief);
      if (!q.is_bounded()) {
        row.a_best = a;
        row.q = q;
        break;
      }
      if (row.a_best < 0 ||
          q.value > row.q.value + 1e-9 * std::max(1.0, std::abs(row.q.value))) {
        row.a_best = a;
        row.q = q;
      }
    }
    row.r = row.q.is_bounded()
                ? ScalarImpact::bounded(cost.cost(m.vertices.size()) +
                                        row.q.value)
                : ScalarImpact::unbounded();
    sol.table.push_back(row);
  }
  int win = -1;
  for (int i = 0; i < static_cast<int>(sol.table.size()); ++i) {
    if (!sol.table[i].r.is_bounded()) continue;
    if (win < 0) {
      win = i;
      continue;
    }
    const double rv = sol.table[i].r.value;
    const double wv = sol.table[win].r.value;
    const double tol = 1e-9 * std::max(1.0, std::abs(wv));
    const auto& mi = sol.table[i].m.vertices;
    const auto& mw = sol.table[win].m.vertices;
    if (rv < wv - tol ||
        (rv <= wv + tol &&
         (mi.size() < mw.size() || (mi.size() == mw.size() && mi < mw))))
      win = i;
  }
  sol.best_monitor_set = sol.table[win].m;
  sol.best_attack = sol.table[win].a_best;
  sol.r_star = sol.table[win].r.value;
  sol.q_star = sol.table[win].q.value;
  return sol;
}

Outcome criterion_game() {
  Outcome out;
  std::mt19937_64 rng(401u);
  const Belief belief = Belief::uniform();
  const CostModel cost = CostModel::linear(1.5);
  int combos = 0;
  for (int g = 0; g < 20; ++g) {
    const int n = 4 + static_cast<int>(rng() % 4);  // 4..7
    const Network net = generate_erdos_renyi(n, 0.5, rng());
    const ClosedLoopSystem sys = build_system(net);
    const int n_s = 1 + static_cast<int>(rng() % 2);
    DominatingCollection collection;
    try {
      collection = enumerate_dominating_sets(net, n_s);
    } catch (const EmptyCollection&) {
      continue;
    }
    const GameSolution fast =
        solve_stackelberg(sys, collection, belief, cost, 8);
    const GameSolution slow = brute_force(sys, collection, belief, cost);
    if (to_json(fast) != to_json(slow))
      out.fail("solver differs from brute force on graph " +
               std::to_string(g));
    if (!verify_stackelberg(fast, sys, belief, cost, 8))
      out.fail("verification rejected a solver output");
    const GameSolution serial =
        solve_stackelberg(sys, collection, belief, cost, 1);
    if (to_json(serial) != to_json(fast))
      out.fail("solution depends on the worker count");
    ++combos;
  }
  if (combos < 12) out.fail("too few solvable graphs drawn");
  return out;
}

// ---- 8. dominating-set trend at desk scale --------------------------------

Outcome criterion_trend() {
  Outcome out;
  ExperimentConfig cfg;
  cfg.n_list = {10, 15, 20, 25};
  cfg.q = 0.5;
  cfg.samples = 100;
  cfg.n_s = 3;
  cfg.seed = 1;
  const auto rows = count_dominating_trend(cfg, 8);
  if (rows.size() != 4) {
    out.fail("wrong row count");
    return out;
  }
  if (!(rows[3].mean_dom_count < rows[0].mean_dom_count))
    out.fail("mean count did not fall from n=10 to n=25");
  if (rows[0].subset_total != 175 || rows[3].subset_total != 2625)
    out.fail("candidate totals off the exact cubic counts");
  return out;
}

// ---- 9. 50-vertex end-to-end demo -----------------------------------------

// First-execution regression pin for seed 1 (count, winner, costs).  The
// published study's own numbers depend on an unpublished random graph and
// are deliberately not targeted.
constexpr std::uint64_t kDemoGraphSeed = 1;
constexpr int kDemoDominatingCount = 14;
constexpr int kDemoBestAttack = 36;
const std::vector<int> kDemoBestSet = {8, 11, 30};
constexpr double kDemoRStar = 16.045870407757381;
constexpr double kDemoQStar = 1.045870407757381;

Outcome criterion_demo(double* demo_seconds) {
  Outcome out;
  const auto t0 = Clock::now();
  const DemoSummary demo = run_paper_demo(1, 8);
  *demo_seconds = seconds_since(t0);
  if (*demo_seconds >= 1800.0) out.fail("demo exceeded its time budget");
  for (const GameRow& row : demo.solution.table)
    if (!row.r.is_bounded() || !row.q.is_bounded() ||
        !std::isfinite(row.r.value) || !std::isfinite(row.q.value))
      out.fail("non-finite table entry");
  const double recomposed =
      demo.kappa * static_cast<double>(demo.solution.best_monitor_set.size()) +
      demo.solution.q_star;
  if (std::abs(demo.solution.r_star - recomposed) >
      1e-9 * std::max(1.0, std::abs(recomposed)))
    out.fail("leader cost identity violated");
  if (demo.subset_total != 20875) out.fail("candidate total off");
  if (demo.dominating_count * 100 >= static_cast<int>(demo.subset_total))
    out.fail("dominating count not below 1% of the candidates");
  if (demo.graph_seed != kDemoGraphSeed) out.fail("regression: graph seed");
  if (demo.dominating_count != kDemoDominatingCount)
    out.fail("regression: dominating count " +
             std::to_string(demo.dominating_count));
  if (demo.solution.best_monitor_set.vertices != kDemoBestSet)
    out.fail("regression: best monitor set");
  if (demo.solution.best_attack != kDemoBestAttack)
    out.fail("regression: best attack " +
             std::to_string(demo.solution.best_attack));
  if (std::abs(demo.solution.r_star - kDemoRStar) > 1e-6)
    out.fail("regression: r_star " +
             detail::fmt_g9(demo.solution.r_star));
  if (std::abs(demo.solution.q_star - kDemoQStar) > 1e-6)
    out.fail("regression: q_star " +
             detail::fmt_g9(demo.solution.q_star));
  return out;
}

// ---- 10. time-domain stealthiness ----------------------------------------

Outcome criterion_stealth() {
  Outcome out;
  const ClosedLoopSystem sys = build_system(p3());
  const MonitorSet m = monitors(sys.net, {1});
  const ImpactResult impact = worst_case_impact(sys, 0, 2, m);
  if (!impact.is_bounded()) {
    out.fail("worked scenario unexpectedly unbounded");
    return out;
  }
  const SimulationTrace tr = simulate_attack(sys, 0, 2, m, impact, 150.0);
  for (double p : tr.monitor_power[0])
    if (p > sys.net.delta[1]) out.fail("monitor power crossed its threshold");
  if (std::abs(tr.target_power.back() - impact.value) > 0.10 * impact.value)
    out.fail("final target power off the certified value by more than 10%");
  return out;
}

void report(int index, const char* label, const Outcome& out, double secs,
            int* failures) {
  if (!out.ok) ++*failures;
  std::printf("[%s] %2d. %s (%.1f s)%s%s\n", out.ok ? "PASS" : "FAIL", index,
              label, secs, out.detail.empty() ? "" : " — ",
              out.detail.c_str());
  std::fflush(stdout);
}

}  // namespace

int main() {
  int failures = 0;
  auto timed = [&](int index, const char* label, auto&& fn) {
    const auto t0 = Clock::now();
    const Outcome out = fn();
    report(index, label, out, seconds_since(t0), &failures);
  };

  timed(1, "candidate counting and enumeration match the definition",
        criterion_counting);
  timed(2, "channel delay equals hop distance plus one",
        criterion_relative_degree);
  timed(3, "certified impacts hit the analytic worked values",
        criterion_impact_analytic);
  timed(4, "certified impacts agree with the independent oracles",
        criterion_impact_oracle);
  {
    const auto t0 = Clock::now();
    const Criteria56 both = criteria_boundedness_and_monotonicity();
    const double secs = seconds_since(t0);
    report(5, "boundedness matches delays and coverage", both.boundedness,
           secs, &failures);
    report(6, "joint monitoring never loses to a single member",
           both.monotonicity, 0.0, &failures);
  }
  timed(7, "game solver matches brute force and verifies", criterion_game);
  timed(8, "dominating-set averages fall while candidates grow",
        criterion_trend);
  {
    double demo_seconds = 0.0;
    const auto t0 = Clock::now();
    const Outcome out = criterion_demo(&demo_seconds);
    report(9, "50-vertex end-to-end demo is finite, consistent, and pinned",
           out, seconds_since(t0), &failures);
  }
  timed(10, "calibrated attack stays stealthy and delivers its impact",
        criterion_stealth);

  if (failures > 0) {
    std::printf("%d of 10 criteria failed\n", failures);
    return 1;
  }
  std::printf("all 10 criteria passed\n");
  return 0;
}
