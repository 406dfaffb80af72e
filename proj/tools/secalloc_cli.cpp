// Command-line front end: sensor-placement design runs against a network
// description on disk.  Subcommands cover candidate enumeration, single
// scenario impact certification, the full placement game, and the canned
// experiment protocols.  All outputs are deterministic for a fixed
// configuration and seed.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "secalloc/errors.hpp"
#include "secalloc/experiments.hpp"
#include "secalloc/game.hpp"
#include "secalloc/graph.hpp"
#include "secalloc/impact.hpp"
#include "secalloc/json_io.hpp"
#include "secalloc/oracle.hpp"

namespace {

// Exit codes are part of the tool's contract.
constexpr int kOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitSchema = 2;
constexpr int kExitGraph = 3;
constexpr int kExitEmpty = 4;
constexpr int kExitUnbounded = 5;
constexpr int kExitIterLimit = 6;

struct Options {
  std::string config_path;
  std::string network_path;
  int budget = 1;
  double kappa = 5.0;
  std::string belief = "uniform";
  std::optional<double> margin;  // self-loop tuning only when requested
  int workers = 1;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  bool verify = false;
  bool require_bounded = false;
  int grid = 100000;

  // impact / simulate scenario (1-based on the command line)
  int attack = 0;
  int target = 0;
  std::vector<int> monitors;
  double duration = 150.0;

  // experiment block
  std::string which;
  std::vector<int> sizes = {10, 15, 20, 25};
  int samples = 100;
  double q = 0.5;
  int demo_n = 50;
  bool budget_explicit = false;  // fig2/demo50 default to budget 3 otherwise
};

// Configuration file: a JSON object using the long flag names; explicit
// command-line flags take precedence.
void load_config(const std::string& path, Options& o) {
  std::ifstream in(path);
  if (!in) throw secalloc::SchemaError("cannot open config file: " + path);
  nlohmann::json doc;
  try {
    std::ostringstream ss;
    ss << in.rdbuf();
    doc = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw secalloc::SchemaError(std::string("config is not valid JSON: ") +
                                e.what());
  }
  if (!doc.is_object())
    throw secalloc::SchemaError("config must be a JSON object");
  const auto take = [&](const char* key, auto& slot) {
    if (doc.contains(key)) {
      try {
        slot = doc[key].get<std::decay_t<decltype(slot)>>();
      } catch (const nlohmann::json::exception&) {
        throw secalloc::SchemaError(std::string("config field has the wrong type: ") + key);
      }
    }
  };
  take("network", o.network_path);
  if (doc.contains("budget")) o.budget_explicit = true;
  take("budget", o.budget);
  take("kappa", o.kappa);
  take("belief", o.belief);
  if (doc.contains("margin")) {
    if (!doc["margin"].is_number())
      throw secalloc::SchemaError("config field has the wrong type: margin");
    o.margin = doc["margin"].get<double>();
  }
  take("workers", o.workers);
  take("seed", o.seed);
  take("out", o.out_dir);
  take("verify", o.verify);
  take("require_bounded", o.require_bounded);
  take("grid", o.grid);
  take("duration", o.duration);
  take("samples", o.samples);
  take("q", o.q);
  take("sizes", o.sizes);
}

secalloc::Belief load_belief(const std::string& spec) {
  if (spec == "uniform") return secalloc::Belief::uniform();
  std::ifstream in(spec);
  if (!in) throw secalloc::SchemaError("cannot open belief file: " + spec);
  nlohmann::json doc;
  try {
    std::ostringstream ss;
    ss << in.rdbuf();
    doc = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw secalloc::SchemaError(std::string("belief file is not valid JSON: ") +
                                e.what());
  }
  if (!doc.is_object() || !doc.contains("rows") || !doc["rows"].is_array())
    throw secalloc::SchemaError("belief file must contain a rows array");
  std::vector<std::vector<double>> rows;
  for (const auto& r : doc["rows"]) {
    if (!r.is_array())
      throw secalloc::SchemaError("belief rows must be arrays of numbers");
    std::vector<double> row;
    for (const auto& v : r) {
      if (!v.is_number())
        throw secalloc::SchemaError("belief entries must be numbers");
      row.push_back(v.get<double>());
    }
    rows.push_back(std::move(row));
  }
  return secalloc::Belief::table(std::move(rows));
}

secalloc::Network load_network(const Options& o) {
  if (o.network_path.empty())
    throw secalloc::SchemaError("a network file is required (--network)");
  secalloc::Network net = secalloc::parse_network(o.network_path);
  if (o.margin) return secalloc::tune_self_loops(net, *o.margin);
  return net;
}

int to_zero_based(int v, int n, const char* what) {
  if (v < 1 || v > n)
    throw secalloc::InvalidScenario(std::string(what) +
                                    " vertex out of range (vertices are "
                                    "numbered from 1)");
  return v - 1;
}

std::filesystem::path out_path(const Options& o, const char* name) {
  return std::filesystem::path(o.out_dir) / name;
}

int cmd_dominating(const Options& o) {
  const secalloc::Network net = load_network(o);
  const auto collection = secalloc::enumerate_dominating_sets(net, o.budget,
                                                              o.workers);
  const std::uint64_t total =
      secalloc::subset_count(net.n, std::min(o.budget, net.n));
  if (o.verify) {
    std::size_t expected = 0;
    secalloc::detail::for_each_subset(
        net.n, std::min(o.budget, net.n), [&](const std::vector<int>& s) {
          if (secalloc::dominating_oracle(net, s)) ++expected;
        });
    for (const auto& m : collection.sets)
      if (!secalloc::dominating_oracle(net, m.vertices))
        throw secalloc::NumericalError("verification failed: listed set does "
                                       "not dominate");
    if (expected != collection.sets.size())
      throw secalloc::NumericalError("verification failed: enumeration "
                                     "missed a dominating set");
    std::cout << "verified against the definition-based oracle\n";
  }
  secalloc::write_text_file(out_path(o, "dominating.json"),
                            secalloc::to_json(collection, total));
  std::cout << "dominating sets: " << collection.sets.size() << " of "
            << total << " candidate subsets\n";
  return kOk;
}

int cmd_impact(const Options& o) {
  const secalloc::Network net = load_network(o);
  const secalloc::ClosedLoopSystem sys = secalloc::build_system(net);
  const int a = to_zero_based(o.attack, net.n, "attack");
  const int rho = to_zero_based(o.target, net.n, "target");
  if (o.monitors.empty())
    throw secalloc::SchemaError("at least one monitor vertex is required");
  std::vector<int> ms;
  for (int v : o.monitors) ms.push_back(to_zero_based(v, net.n, "monitor"));
  std::sort(ms.begin(), ms.end());
  const secalloc::MonitorSet m_set =
      secalloc::MonitorSet::make(net, ms, static_cast<int>(ms.size()));

  const secalloc::ImpactResult res =
      secalloc::worst_case_impact(sys, a, rho, m_set);
  if (!res.is_bounded() && o.require_bounded) {
    std::cerr << "error: impact is unbounded for this scenario\n";
    return kExitUnbounded;
  }
  if (o.verify && res.is_bounded()) {
    if (ms.size() == 1) {
      const double sweep = secalloc::sweep_ratio_oracle(
          sys, a, rho, ms[0], net.delta[ms[0]], o.grid);
      if (std::abs(sweep - res.value) > 5e-3 * std::max(1.0, res.value))
        throw secalloc::NumericalError(
            "verification failed: frequency sweep disagrees");
    } else if (ms.size() == 2) {
      const auto problem =
          secalloc::make_discretized_problem(sys, a, rho, m_set);
      const double disc = secalloc::discretized_impact_oracle(
          problem, {net.delta[ms[0]], net.delta[ms[1]]});
      if (disc > res.value * 1.05 + 1e-9)
        throw secalloc::NumericalError(
            "verification failed: discretized restriction exceeds the bound");
    } else {
      throw secalloc::SchemaError(
          "--verify supports at most two monitors");
    }
    std::cout << "verified against the independent oracle\n";
  }
  secalloc::write_text_file(out_path(o, "impact.json"),
                            secalloc::to_json(res));
  if (res.is_bounded())
    std::cout << "impact: " << secalloc::detail::fmt_g9(res.value) << "\n";
  else
    std::cout << "impact: unbounded\n";
  return kOk;
}

int cmd_solve(const Options& o) {
  const secalloc::Network net = load_network(o);
  const secalloc::ClosedLoopSystem sys = secalloc::build_system(net);
  const secalloc::Belief belief = load_belief(o.belief);
  const secalloc::CostModel cost = secalloc::CostModel::linear(o.kappa);
  const auto collection = secalloc::enumerate_dominating_sets(net, o.budget,
                                                              o.workers);
  const secalloc::GameSolution sol =
      secalloc::solve_stackelberg(sys, collection, belief, cost, o.workers);
  if (o.verify) {
    if (!secalloc::verify_stackelberg(sol, sys, belief, cost, o.workers))
      throw secalloc::NumericalError(
          "verification failed: equilibrium conditions violated");
    std::cout << "verified: equilibrium conditions hold\n";
  }
  secalloc::write_text_file(out_path(o, "solution.json"),
                            secalloc::to_json(sol));
  std::cout << "m_star: "
            << secalloc::detail::json_vertices(sol.best_monitor_set.vertices)
            << "\na_star: " << sol.best_attack + 1
            << "\nr_star: " << secalloc::detail::fmt_g9(sol.r_star)
            << "\nq_star: " << secalloc::detail::fmt_g9(sol.q_star) << "\n";
  return kOk;
}

int cmd_experiment(const Options& o) {
  // The canned studies follow the three-sensor protocol unless overridden.
  const int budget = o.budget_explicit ? o.budget : 3;
  if (o.which == "fig2") {
    secalloc::ExperimentConfig cfg;
    cfg.n_list = o.sizes;
    cfg.q = o.q;
    cfg.samples = o.samples;
    cfg.n_s = budget;
    cfg.seed = o.seed;
    const auto rows = secalloc::count_dominating_trend(cfg, o.workers);
    secalloc::write_text_file(out_path(o, "fig2.csv"),
                              secalloc::to_csv(rows));
    std::cout << "trend rows: " << rows.size() << "\n";
    return kOk;
  }
  if (o.which == "demo50") {
    const secalloc::DemoSummary demo = secalloc::run_paper_demo(
        o.seed, o.workers, o.demo_n, o.q, budget, o.kappa);
    secalloc::write_text_file(out_path(o, "demo50.json"),
                              secalloc::to_json(demo));
    std::cout << "graph seed: " << demo.graph_seed
              << "\ndominating sets: " << demo.dominating_count << " of "
              << demo.subset_total << "\nm_star: "
              << secalloc::detail::json_vertices(
                     demo.solution.best_monitor_set.vertices)
              << "\na_star: " << demo.solution.best_attack + 1
              << "\nr_star: " << secalloc::detail::fmt_g9(demo.solution.r_star)
              << "\nq_star: " << secalloc::detail::fmt_g9(demo.solution.q_star)
              << "\n";
    return kOk;
  }
  if (o.which == "simulate") {
    const secalloc::Network net = load_network(o);
    const secalloc::ClosedLoopSystem sys = secalloc::build_system(net);
    const int a = to_zero_based(o.attack, net.n, "attack");
    const int rho = to_zero_based(o.target, net.n, "target");
    if (o.monitors.empty())
      throw secalloc::SchemaError("at least one monitor vertex is required");
    std::vector<int> ms;
    for (int v : o.monitors) ms.push_back(to_zero_based(v, net.n, "monitor"));
    std::sort(ms.begin(), ms.end());
    const secalloc::MonitorSet m_set =
        secalloc::MonitorSet::make(net, ms, static_cast<int>(ms.size()));
    const secalloc::ImpactResult impact =
        secalloc::worst_case_impact(sys, a, rho, m_set);
    if (!impact.is_bounded()) {
      std::cerr << "error: impact is unbounded; nothing to simulate\n";
      return kExitUnbounded;
    }
    const secalloc::SimulationTrace tr =
        secalloc::simulate_attack(sys, a, rho, m_set, impact, o.duration);
    secalloc::write_text_file(out_path(o, "trace.csv"), secalloc::to_csv(tr));
    secalloc::write_text_file(out_path(o, "trace.json"),
                              secalloc::trace_sidecar(tr));
    std::cout << "trace samples: " << tr.t.size() << "\n";
    return kOk;
  }
  throw secalloc::SchemaError(
      "unknown experiment (expected fig2, demo50, or simulate)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sensor placement against stealthy data-injection attacks"};
  app.require_subcommand(1);
  Options o;

  // Scan for a config file first so explicit flags can override its values.
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") o.config_path = argv[i + 1];
  if (!o.config_path.empty()) {
    try {
      load_config(o.config_path, o);
    } catch (const secalloc::SchemaError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitSchema;
    }
  }

  double margin_flag = 0.0;
  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", o.config_path,
                    "JSON file with the same vocabulary as the flags");
    cmd->add_option("--network", o.network_path, "network description file");
    cmd->add_option("--budget", o.budget, "monitor budget n_s")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--kappa", o.kappa, "per-sensor cost")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--belief", o.belief, "uniform or a belief table file");
    cmd->add_option("--margin", margin_flag,
                    "tune self-loop gains with this stability margin")
        ->check(CLI::NonNegativeNumber)
        ->each([&](const std::string&) { o.margin = margin_flag; });
    cmd->add_option("--workers", o.workers, "worker thread count")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "base random seed");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_flag("--verify", o.verify,
                  "re-check results with the independent oracles");
    cmd->add_flag("--require-bounded", o.require_bounded,
                  "fail when the impact is unbounded");
    cmd->add_option("--grid", o.grid, "frequency grid size for --verify")
        ->check(CLI::PositiveNumber);
  };

  CLI::App* dom = app.add_subcommand(
      "dominating", "enumerate admissible monitor sets");
  add_common(dom);

  CLI::App* imp = app.add_subcommand(
      "impact", "certify the worst-case impact of one scenario");
  add_common(imp);
  imp->add_option("--attack", o.attack, "attack vertex (1-based)")
      ->required();
  imp->add_option("--target", o.target, "target vertex (1-based)")
      ->required();
  imp->add_option("--monitors", o.monitors, "monitor vertices (1-based)")
      ->required()
      ->delimiter(',');

  CLI::App* solve = app.add_subcommand(
      "solve", "solve the full placement game");
  add_common(solve);

  CLI::App* exp = app.add_subcommand(
      "experiment", "run a canned study (fig2, demo50, simulate)");
  add_common(exp);
  exp->add_option("which", o.which, "fig2, demo50, or simulate")->required();
  exp->add_option("--sizes", o.sizes, "graph sizes for fig2")->delimiter(',');
  exp->add_option("--samples", o.samples, "Monte-Carlo samples per size")
      ->check(CLI::PositiveNumber);
  exp->add_option("--q", o.q, "edge probability");
  exp->add_option("--n", o.demo_n, "graph size for demo50")
      ->check(CLI::PositiveNumber);
  exp->add_option("--attack", o.attack, "attack vertex (1-based)");
  exp->add_option("--target", o.target, "target vertex (1-based)");
  exp->add_option("--monitors", o.monitors, "monitor vertices (1-based)")
      ->delimiter(',');
  exp->add_option("--duration", o.duration, "simulation horizon (seconds)")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitSchema;
  }
  for (CLI::App* cmd : {dom, imp, solve, exp})
    if (cmd->parsed() && cmd->count("--budget") > 0) o.budget_explicit = true;

  try {
    if (dom->parsed()) return cmd_dominating(o);
    if (imp->parsed()) return cmd_impact(o);
    if (solve->parsed()) return cmd_solve(o);
    if (exp->parsed()) return cmd_experiment(o);
    return kExitSchema;
  } catch (const secalloc::SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const secalloc::InvalidScenario& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const secalloc::GraphError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitGraph;
  } catch (const secalloc::GenerationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitGraph;
  } catch (const secalloc::EmptyCollection& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitEmpty;
  } catch (const secalloc::IterationLimit& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIterLimit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}
