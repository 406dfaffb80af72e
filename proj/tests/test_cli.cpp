#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "secalloc/impact.hpp"
#include "secalloc/json_io.hpp"

using namespace secalloc;
namespace fs = std::filesystem;

namespace {

// The binary under test, injected by the build.
constexpr const char* kCli = SECALLOC_CLI_PATH;

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(kCli) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path("cli_scratch") / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kP3 = R"({"n": 3, "edges": [[1,2],[2,3]], "theta": 0.5, "delta": 1.0})";
const char* kP4 = R"({"n": 4, "edges": [[1,2],[2,3],[3,4]]})";
const char* kK3 = R"({"n": 3, "edges": [[1,2],[2,3],[1,3]]})";

}  // namespace

TEST_CASE("json emitters use nine significant digits and end with newline") {
  const Network net =
      Network::create(3, {{0, 1}, {1, 2}}, std::vector<double>(3, 0.5),
                      std::vector<double>(3, 1.0));
  const ClosedLoopSystem sys = build_system(net);
  const MonitorSet m = MonitorSet::make(net, {1}, 1);
  const ImpactResult res = worst_case_impact(sys, 0, 2, m);
  const std::string doc = to_json(res);
  CHECK(doc.find("\"status\":\"bounded\"") != std::string::npos);
  CHECK(doc.find("\"monitors\":[2]") != std::string::npos);
  CHECK(doc.find("\"value\":0.444444444") != std::string::npos);
  CHECK(doc.back() == '\n');
  CHECK(nlohmann::json::parse(doc)["value"].get<double>() ==
        Catch::Approx(4.0 / 9.0).epsilon(1e-8));

  const ImpactResult ub = ImpactResult::make_unbounded({0, 2});
  const std::string ubdoc = to_json(ub);
  CHECK(ubdoc.find("\"status\":\"unbounded\"") != std::string::npos);
  CHECK(ubdoc.find("\"monitors\":[1,3]") != std::string::npos);
  CHECK(ubdoc.find("value") == std::string::npos);
}

TEST_CASE("game solutions serialize with 1-based vertices and null rows") {
  GameSolution sol;
  sol.best_monitor_set.vertices = {1};
  sol.best_attack = 0;
  sol.r_star = 5.0 + 13.0 / 18.0;
  sol.q_star = 13.0 / 18.0;
  GameRow good;
  good.m.vertices = {1};
  good.a_best = 0;
  good.q = ScalarImpact::bounded(13.0 / 18.0);
  good.r = ScalarImpact::bounded(5.0 + 13.0 / 18.0);
  GameRow bad;
  bad.m.vertices = {0};
  bad.a_best = 2;
  bad.q = ScalarImpact::unbounded();
  bad.r = ScalarImpact::unbounded();
  sol.table = {good, bad};
  const std::string doc = to_json(sol);
  CHECK(doc.find("\"m_star\":[2]") != std::string::npos);
  CHECK(doc.find("\"a_star\":1") != std::string::npos);
  CHECK(doc.find("\"r_star\":5.72222222") != std::string::npos);
  CHECK(doc.find("\"r\":null") != std::string::npos);
  CHECK(doc.find("\"q\":null") != std::string::npos);
  const auto parsed = nlohmann::json::parse(doc);
  CHECK(parsed["table"].size() == 2);
  CHECK(parsed["table"][1]["r"].is_null());
}

TEST_CASE("dominating subcommand writes the collection with its counts") {
  const fs::path dir = scratch("dominating");
  write_file(dir / "p3.json", kP3);
  write_file(dir / "k3.json", kK3);

  REQUIRE(run_cli("dominating --network " + (dir / "p3.json").string() +
                  " --budget 1 --out " + dir.string() + " --verify") == 0);
  auto doc = nlohmann::json::parse(read_file(dir / "dominating.json"));
  CHECK(doc["count"] == 1);
  CHECK(doc["subset_count"] == 3);
  CHECK(doc["sets"] == nlohmann::json::parse("[[2]]"));

  REQUIRE(run_cli("dominating --network " + (dir / "p3.json").string() +
                  " --budget 2 --out " + dir.string()) == 0);
  doc = nlohmann::json::parse(read_file(dir / "dominating.json"));
  CHECK(doc["count"] == 4);

  REQUIRE(run_cli("dominating --network " + (dir / "k3.json").string() +
                  " --budget 1 --out " + dir.string() + " --verify") == 0);
  doc = nlohmann::json::parse(read_file(dir / "dominating.json"));
  CHECK(doc["count"] == 3);
}

TEST_CASE("impact subcommand certifies the worked scenario") {
  const fs::path dir = scratch("impact");
  write_file(dir / "p3.json", kP3);
  REQUIRE(run_cli("impact --network " + (dir / "p3.json").string() +
                  " --attack 1 --target 3 --monitors 2 --out " + dir.string() +
                  " --verify --grid 20000") == 0);
  const auto doc = nlohmann::json::parse(read_file(dir / "impact.json"));
  CHECK(doc["status"] == "bounded");
  CHECK(doc["value"].get<double>() == Catch::Approx(4.0 / 9.0).epsilon(1e-8));

  // Attacking the target itself is ill-posed.
  CHECK(run_cli("impact --network " + (dir / "p3.json").string() +
                " --attack 1 --target 1 --monitors 2 --out " + dir.string()) ==
        2);
}

TEST_CASE("unbounded scenarios are reported and can be made fatal") {
  const fs::path dir = scratch("unbounded");
  write_file(dir / "p4.json", kP4);
  // Monitor farther from the attack than the target: undetectable.
  REQUIRE(run_cli("impact --network " + (dir / "p4.json").string() +
                  " --attack 1 --target 2 --monitors 3 --out " +
                  dir.string()) == 0);
  const auto doc = nlohmann::json::parse(read_file(dir / "impact.json"));
  CHECK(doc["status"] == "unbounded");

  CHECK(run_cli("impact --network " + (dir / "p4.json").string() +
                " --attack 1 --target 2 --monitors 3 --require-bounded "
                "--out " +
                dir.string()) == 5);
}

TEST_CASE("solve subcommand reproduces the worked equilibrium") {
  const fs::path dir = scratch("solve");
  write_file(dir / "p3.json", kP3);
  REQUIRE(run_cli("solve --network " + (dir / "p3.json").string() +
                  " --budget 1 --kappa 5 --out " + dir.string() +
                  " --verify") == 0);
  const auto doc = nlohmann::json::parse(read_file(dir / "solution.json"));
  CHECK(doc["m_star"] == nlohmann::json::parse("[2]"));
  CHECK(doc["a_star"] == 1);
  CHECK(doc["r_star"].get<double>() ==
        Catch::Approx(5.0 + 13.0 / 18.0).epsilon(1e-8));
  CHECK(doc["q_star"].get<double>() ==
        Catch::Approx(13.0 / 18.0).epsilon(1e-8));
}

TEST_CASE("identical configurations give byte-identical artifacts") {
  const fs::path dir = scratch("determinism");
  write_file(dir / "p3.json", kP3);
  const std::string base = "solve --network " + (dir / "p3.json").string() +
                           " --budget 2 --kappa 1 ";
  REQUIRE(run_cli(base + "--workers 1 --out " + (dir / "w1").string()) == 0);
  REQUIRE(run_cli(base + "--workers 8 --out " + (dir / "w8").string()) == 0);
  CHECK(read_file(dir / "w1" / "solution.json") ==
        read_file(dir / "w8" / "solution.json"));

  const std::string fig = "experiment fig2 --sizes 6,8 --samples 3 --budget "
                          "2 --seed 7 ";
  REQUIRE(run_cli(fig + "--out " + (dir / "f1").string()) == 0);
  REQUIRE(run_cli(fig + "--out " + (dir / "f2").string()) == 0);
  CHECK(read_file(dir / "f1" / "fig2.csv") ==
        read_file(dir / "f2" / "fig2.csv"));
}

TEST_CASE("experiment fig2 writes one row per size") {
  const fs::path dir = scratch("fig2");
  REQUIRE(run_cli("experiment fig2 --sizes 6,8 --samples 2 --budget 2 "
                  "--seed 1 --out " +
                  dir.string()) == 0);
  const std::string csv = read_file(dir / "fig2.csv");
  CHECK(csv.rfind("n,samples,mean_dom_count,subset_count\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(csv.back() == '\n');
}

TEST_CASE("experiment simulate writes a trace and its sidecar") {
  const fs::path dir = scratch("simulate");
  write_file(dir / "p3.json", kP3);
  REQUIRE(run_cli("experiment simulate --network " +
                  (dir / "p3.json").string() +
                  " --attack 1 --target 3 --monitors 2 --duration 30 --out " +
                  dir.string()) == 0);
  const std::string sidecar = read_file(dir / "trace.json");
  CHECK(std::count(sidecar.begin(), sidecar.end(), '\n') == 8);
  const auto meta = nlohmann::json::parse(sidecar);
  CHECK(meta["attack"] == 1);
  CHECK(meta["monitors"] == nlohmann::json::parse("[2]"));
  const std::string csv = read_file(dir / "trace.csv");
  CHECK(csv.rfind("t,x_1,x_2,x_3,y_rho,y_m2\n", 0) == 0);
  CHECK(csv.back() == '\n');
}

TEST_CASE("config files feed defaults and flags override them") {
  const fs::path dir = scratch("config");
  write_file(dir / "p3.json", kP3);
  write_file(dir / "run.json",
             std::string("{\"network\": \"") + (dir / "p3.json").string() +
                 "\", \"budget\": 1, \"kappa\": 5, \"out\": \"" +
                 dir.string() + "\"}");
  REQUIRE(run_cli("solve --config " + (dir / "run.json").string()) == 0);
  auto doc = nlohmann::json::parse(read_file(dir / "solution.json"));
  CHECK(doc["r_star"].get<double>() ==
        Catch::Approx(5.0 + 13.0 / 18.0).epsilon(1e-8));

  // Explicit flag wins over the config value.
  REQUIRE(run_cli("solve --config " + (dir / "run.json").string() +
                  " --kappa 0") == 0);
  doc = nlohmann::json::parse(read_file(dir / "solution.json"));
  CHECK(doc["r_star"].get<double>() ==
        Catch::Approx(13.0 / 18.0).epsilon(1e-8));
}

TEST_CASE("usage errors exit with the schema code") {
  const fs::path dir = scratch("usage");
  write_file(dir / "p4.json", kP4);
  CHECK(run_cli("solve --network " + (dir / "missing.json").string() +
                " --budget 1 --out " + dir.string()) == 2);
  CHECK(run_cli("dominating --network " + (dir / "p4.json").string() +
                " --budget 0 --out " + dir.string()) == 2);
  CHECK(run_cli("experiment nonsense --out " + dir.string()) == 2);
  // A path-of-four has no dominating singleton.
  CHECK(run_cli("dominating --network " + (dir / "p4.json").string() +
                " --budget 1 --out " + dir.string()) == 4);
}
