#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "secalloc/experiments.hpp"
#include "secalloc/oracle.hpp"

using namespace secalloc;

namespace {

Network p3(double theta = 0.5) {
  return Network::create(3, {{0, 1}, {1, 2}}, std::vector<double>(3, theta),
                         std::vector<double>(3, 1.0));
}

MonitorSet monitors(const Network& net, std::vector<int> vs) {
  const int budget = static_cast<int>(vs.size());
  return MonitorSet::make(net, std::move(vs), budget);
}

}  // namespace

TEST_CASE("experiment configs are validated") {
  ExperimentConfig cfg;
  cfg.n_list = {};
  CHECK_THROWS_AS(cfg.validate(), SchemaError);
  cfg.n_list = {1};
  CHECK_THROWS_AS(cfg.validate(), SchemaError);
  cfg.n_list = {4};
  cfg.samples = 0;
  CHECK_THROWS_AS(cfg.validate(), SchemaError);
  cfg.samples = 3;
  cfg.q = 1.5;
  CHECK_THROWS_AS(cfg.validate(), SchemaError);
  cfg.q = 0.5;
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("triangle graphs give an exact dominating mean") {
  ExperimentConfig cfg;
  cfg.n_list = {3};
  cfg.q = 1.0;  // always the complete graph on three vertices
  cfg.samples = 4;
  cfg.n_s = 1;
  const auto rows = count_dominating_trend(cfg);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].n == 3);
  CHECK(rows[0].samples == 4);
  CHECK(rows[0].mean_dom_count == 3.0);  // every singleton dominates K3
  CHECK(rows[0].subset_total == 3);
}

TEST_CASE("dominating-set averages fall as graphs grow") {
  ExperimentConfig cfg;
  cfg.n_list = {6, 16};
  cfg.q = 0.5;
  cfg.samples = 16;
  cfg.n_s = 2;
  cfg.seed = 1;
  const auto rows = count_dominating_trend(cfg, 2);
  REQUIRE(rows.size() == 2);
  // The candidate pool grows quadratically while the mean count drops.
  CHECK(rows[0].subset_total == 21);
  CHECK(rows[1].subset_total == 136);
  CHECK(rows[1].mean_dom_count < rows[0].mean_dom_count);
}

TEST_CASE("trend rows are reproducible and schedule independent") {
  ExperimentConfig cfg;
  cfg.n_list = {5, 8};
  cfg.samples = 6;
  cfg.n_s = 2;
  cfg.seed = 42;
  const auto a = count_dominating_trend(cfg, 1);
  const auto b = count_dominating_trend(cfg, 4);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].n == b[i].n);
    CHECK(a[i].mean_dom_count == b[i].mean_dom_count);
    CHECK(a[i].subset_total == b[i].subset_total);
  }
}

TEST_CASE("desk-scale placement demo satisfies the structural claims") {
  const DemoSummary demo = run_paper_demo(1, 2, 8, 0.5, 2, 2.0);
  CHECK(demo.n == 8);
  CHECK(demo.subset_total == subset_count(8, 2));
  CHECK(demo.dominating_count ==
        static_cast<int>(demo.solution.table.size()));
  CHECK(demo.dominating_count < static_cast<int>(demo.subset_total));
  for (const GameRow& row : demo.solution.table) {
    REQUIRE(row.r.is_bounded());
    CHECK(row.r.value <= demo.max_r);
    CHECK(row.q.value <= demo.max_q);
  }
  CHECK(demo.solution.r_star <= demo.max_r + 1e-12);
  // Leader cost identity at the optimum.
  const double recomposed =
      2.0 * static_cast<double>(demo.solution.best_monitor_set.size()) +
      demo.solution.q_star;
  CHECK(demo.solution.r_star == Catch::Approx(recomposed).epsilon(1e-12));
  const ClosedLoopSystem sys =
      build_system(generate_erdos_renyi(8, 0.5, demo.graph_seed));
  CHECK(verify_stackelberg(demo.solution, sys, Belief::uniform(),
                           CostModel::linear(2.0), 2));
}

TEST_CASE("zero attack input leaves the system at equilibrium") {
  const ClosedLoopSystem sys = build_system(p3());
  const auto xs = detail::rk4_states(
      sys.lbar, 0, [](double) { return 0.0; }, 0.01, 200);
  REQUIRE(xs.size() == 201);
  for (const auto& x : xs) CHECK(x.norm() == 0.0);
}

TEST_CASE("constant-input stealthy attack realizes the certified impact") {
  const ClosedLoopSystem sys = build_system(p3());
  const MonitorSet m = monitors(sys.net, {1});
  const ImpactResult impact = worst_case_impact(sys, 0, 2, m);
  REQUIRE(impact.is_bounded());
  REQUIRE(impact.worst_frequency == Catch::Approx(0.0).margin(1e-6));

  const SimulationTrace tr = simulate_attack(sys, 0, 2, m, impact, 150.0);
  REQUIRE_FALSE(tr.t.empty());
  CHECK(tr.omega == Catch::Approx(0.0).margin(1e-6));
  // The running monitor power rises monotonically toward its calibrated
  // ceiling and never crosses the alarm threshold.
  for (double p : tr.monitor_power[0]) CHECK(p <= 1.0);
  CHECK(tr.monitor_power[0].back() ==
        Catch::Approx(1.0 - 1e-3).epsilon(0.05));
  CHECK(tr.target_power.back() ==
        Catch::Approx(impact.value).epsilon(0.10));
  // Columns stay aligned with the state dimension.
  CHECK(tr.x.front().size() == 3);
  CHECK(tr.y_target.size() == tr.t.size());
}

TEST_CASE("sinusoidal stealthy attack stays under the alarm threshold") {
  // Find a certified scenario whose binding frequency is strictly positive.
  std::mt19937_64 rng(5u);
  bool found = false;
  for (int g = 0; g < 12 && !found; ++g) {
    const int n = 4 + static_cast<int>(rng() % 3);
    const Network net = generate_erdos_renyi(n, 0.5, rng());
    const ClosedLoopSystem sys = build_system(net);
    for (int a = 0; a < n && !found; ++a)
      for (int rho = 0; rho < n && !found; ++rho) {
        if (rho == a) continue;
        for (int m = 0; m < n && !found; ++m) {
          if (relative_degree(sys, m, a) > relative_degree(sys, rho, a))
            continue;
          const MonitorSet ms = monitors(net, {m});
          const ImpactResult impact = worst_case_impact(sys, a, rho, ms);
          if (!impact.is_bounded() || impact.worst_frequency < 0.5) continue;
          // The start-up transient adds O(1/(lambda_min T)) to the running
          // average, so the horizon must be long enough for the calibration
          // margin to dominate it.
          const SimulationTrace tr =
              simulate_attack(sys, a, rho, ms, impact, 3000.0);
          CHECK(tr.omega == impact.worst_frequency);
          CHECK(tr.monitor_power[0].back() <= sys.net.delta[m]);
          CHECK(tr.monitor_power[0].back() ==
                Catch::Approx((1.0 - 1e-3) * sys.net.delta[m]).epsilon(0.05));
          CHECK(tr.target_power.back() ==
                Catch::Approx(impact.value).epsilon(0.10));
          found = true;
        }
      }
  }
  CHECK(found);
}

TEST_CASE("simulation rejects inconsistent requests") {
  const ClosedLoopSystem sys = build_system(p3());
  const MonitorSet m = monitors(sys.net, {1});
  const ImpactResult impact = worst_case_impact(sys, 0, 2, m);
  CHECK_THROWS_AS(simulate_attack(sys, 0, 0, m, impact, 10.0),
                  InvalidScenario);
  CHECK_THROWS_AS(simulate_attack(sys, 0, 2, m, impact, -1.0),
                  InvalidScenario);
  // Certificate computed for a different monitor set.
  CHECK_THROWS_AS(
      simulate_attack(sys, 0, 2, monitors(sys.net, {0}), impact, 10.0),
      InvalidScenario);
  // Unbounded scenarios cannot be realized by a bounded-power input.
  const ImpactResult ub = ImpactResult::make_unbounded({0});
  CHECK_THROWS_AS(simulate_attack(sys, 1, 2, monitors(sys.net, {0}), ub, 10.0),
                  InvalidScenario);
}
