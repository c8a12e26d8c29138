#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "uavroute/cli.hpp"
#include "uavroute/config.hpp"
#include "uavroute/topology.hpp"

namespace fs = std::filesystem;
using namespace uavroute;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::path(UAVROUTE_TEST_TMP) / "cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

const char* kSmall = R"(
episodes: 300
seeds: [1, 2]
topology: {nodes: 8}
sweep: {node_counts: [6, 8], seeds: [1, 2], episodes: 300}
)";

}  // namespace

TEST_CASE("generate") {
  const auto dir = scratch("generate");
  const auto a = (dir / "a.txt").string();
  const auto b = (dir / "b.txt").string();
  CHECK(run({"generate", "-n", "20", "--seed", "7", "--out", a}).code == cli::kOk);
  CHECK(run({"generate", "-n", "20", "--seed", "7", "--out", b}).code == cli::kOk);
  CHECK(slurp(a) == slurp(b));
  CHECK(load_topology_file(a) == generate_random_topology(TopologyParams{}, 7));
  const auto nested = (dir / "x" / "y" / "c.txt").string();
  CHECK(run({"generate", "-n", "20", "--seed", "7", "--out", nested}).code == cli::kOk);
  CHECK(slurp(nested) == slurp(a));

  CHECK(run({"generate", "-n", "1"}).code == cli::kUsage);
  CHECK(run({"generate", "--bogus"}).code == cli::kUsage);
  CHECK(run({}).code == cli::kUsage);
  CHECK(run({"generate", "-n", "2", "--area", "5", "5", "--heights", "130", "130"}).code == cli::kScenario);
  CHECK(run({"generate", "--bounds", "500", "30"}).code == cli::kConfig);
}

TEST_CASE("rank") {
  const auto dir = scratch("rank");
  const auto topo = (dir / "bridge.txt").string();
  save_topology_file(fixtures::bridge_network(), topo);
  const auto r = run({"rank", "--topology", topo});
  REQUIRE(r.code == cli::kOk);
  CHECK(r.out.find("node,degree,importance,rank,attacked\n") == 0);
  CHECK(r.out.find("2,3,5,1,0\n") != std::string::npos);
  CHECK(r.out.find("3,3,5,2,0\n") != std::string::npos);
  CHECK(r.out.find("2,3,0,4,4\n") != std::string::npos);

  const auto far = (dir / "far.txt").string();
  save_topology_file(fixtures::from_positions({{0, 0, 130}, {900, 0, 130}, {0, 900, 130}}), far);
  const auto sparse = run({"rank", "--topology", far, "--out", (dir / "tables").string()});
  REQUIRE(sparse.code == cli::kOk);
  CHECK(slurp(dir / "tables" / "nodes.csv") ==
        "node,degree,importance,rank,attacked\n0,0,0,1,0\n1,0,0,2,0\n2,0,0,3,0\n");
  CHECK(slurp(dir / "tables" / "edges.csv") == "i,j,triangles,connectivity,importance\n");

  CHECK(run({"rank", "--topology", (dir / "missing.txt").string()}).code == cli::kIo);
  CHECK(run({"rank"}).code == cli::kUsage);
}

TEST_CASE("attack") {
  const auto dir = scratch("attack");
  const auto topo = (dir / "bridge.txt").string();
  const auto hit = (dir / "hit.txt").string();
  save_topology_file(fixtures::bridge_network(), topo);
  const auto r = run({"attack", "--topology", topo, "--count", "1", "--out", hit});
  REQUIRE(r.code == cli::kOk);
  CHECK(r.err.find("attacked: 2") != std::string::npos);
  const auto net = load_topology_file(hit);
  CHECK(net.node(2).attacked);
  CHECK(net.adjacency().edge_count() == 4);

  CHECK(run({"attack", "--topology", topo, "--count", "1", "--protect", "2", "3"}).err.find("attacked: 0") !=
        std::string::npos);
  CHECK(run({"attack", "--topology", topo, "--count", "9"}).code == cli::kUsage);
  CHECK(run({"attack", "--topology", topo, "--model", "smart"}).code == cli::kUsage);
}

TEST_CASE("train and evaluate") {
  const auto dir = scratch("train");
  const auto cfg = (dir / "small.yaml").string();
  write(cfg, kSmall);
  const auto out = (dir / "run").string();
  REQUIRE(run({"train", "--config", cfg, "--out", out, "--jobs", "2"}).code == cli::kOk);
  for (const char* f : {"scenario.csv", "topology.txt", "episodes.csv", "qtable_sarsa_lambda.csv",
                        "qtable_sarsa.csv", "qtable_q_learning.csv", "evaluation_sarsa.csv"}) {
    CHECK(fs::exists(fs::path(out) / f));
  }
  const auto episodes = slurp(fs::path(out) / "episodes.csv");

  const auto again = (dir / "again").string();
  REQUIRE(run({"train", "--config", cfg, "--out", again}).code == cli::kOk);
  CHECK(slurp(fs::path(again) / "episodes.csv") == episodes);
  CHECK(slurp(fs::path(again) / "qtable_sarsa.csv") == slurp(fs::path(out) / "qtable_sarsa.csv"));

  const auto one = (dir / "one").string();
  REQUIRE(run({"train", "--config", cfg, "--agent", "sarsa", "--out", one}).code == cli::kOk);
  CHECK_FALSE(fs::exists(fs::path(one) / "qtable_q_learning.csv"));
  CHECK(run({"train", "--config", cfg, "--agent", "nope", "--out", one}).code == cli::kConfig);

  const auto q = (fs::path(out) / "qtable_sarsa_lambda.csv").string();
  const auto eval = run({"evaluate", "--config", cfg, "--qtable", q});
  CHECK(eval.out.find("status") != std::string::npos);
  CHECK((eval.code == cli::kOk || eval.code == cli::kScenario));
  CHECK(eval.out == slurp(fs::path(out) / "evaluation_sarsa_lambda.csv"));
  CHECK(run({"evaluate", "--config", cfg, "--qtable", (dir / "none.csv").string()}).code == cli::kIo);
}

TEST_CASE("experiment") {
  const auto dir = scratch("experiment");
  const auto cfg = (dir / "small.yaml").string();
  write(cfg, kSmall);

  const auto dry = (dir / "dry").string();
  CHECK(run({"experiment", "--config", cfg, "--out", dry, "--dry-run"}).code == cli::kOk);
  CHECK_FALSE(fs::exists(dry));

  const auto a = (dir / "a").string();
  const auto b = (dir / "b").string();
  REQUIRE(run({"experiment", "--config", cfg, "--out", a}).code == cli::kOk);
  REQUIRE(run({"experiment", "--config", cfg, "--out", b, "--jobs", "3"}).code == cli::kOk);
  for (const char* f : {"fig2_reward_steps.csv", "fig3_delay_nodes.csv", "fig4_steps_distance_hops.csv",
                        "comparison.csv", "episodes.csv", "sweep.csv", "manifest.json"}) {
    REQUIRE(fs::exists(fs::path(a) / f));
    CHECK(slurp(fs::path(a) / f) == slurp(fs::path(b) / f));
  }
  const auto manifest = slurp(fs::path(a) / "manifest.json");
  CHECK(manifest.find("\"config_hash\"") != std::string::npos);
  CHECK(manifest.find("\"seeds\"") != std::string::npos);

  const auto bad = (dir / "bad.yaml").string();
  write(bad, "episodes: 10\nsweeep: {}\n");
  const auto r = run({"experiment", "--config", bad, "--out", (dir / "x").string()});
  CHECK(r.code == cli::kConfig);
  CHECK(r.err.find("sweeep") != std::string::npos);
  CHECK(run({"experiment", "--config", bad, "--dry-run"}).code == cli::kConfig);
  CHECK(run({"experiment", "--config", (dir / "missing.yaml").string()}).code == cli::kIo);
}

TEST_CASE("output directory from the environment") {
  const auto dir = scratch("env");
  const auto cfg = (dir / "small.yaml").string();
  write(cfg, "episodes: 100\nseeds: [1]\ntopology: {nodes: 6}\nsweep: {enabled: false}\n");
  const auto target = (dir / "from_env").string();
  ::setenv(cli::kOutEnv, target.c_str(), 1);
  const auto r = run({"experiment", "--config", cfg});
  ::unsetenv(cli::kOutEnv);
  REQUIRE(r.code == cli::kOk);
  CHECK(fs::exists(fs::path(target) / "fig2_reward_steps.csv"));
  CHECK_FALSE(fs::exists(fs::path(target) / "fig3_delay_nodes.csv"));
}

TEST_CASE("bundled reproduction config") {
  const auto dir = scratch("reproduction");
  auto config = load_config_file(std::string(UAVROUTE_SOURCE_DIR) + "/configs/reproduction.yaml");
  config.episodes = 400;
  config.attacks.front().episode = 200;
  config.seeds = {1, 2};
  config.sweep.seeds = {1, 2};
  config.sweep.episodes = 400;
  const auto cfg = dir / "reproduction.yaml";
  write(cfg, dump_config(config));
  REQUIRE(run({"experiment", "--config", cfg.string(), "--out", dir.string(), "--jobs", "4"}).code == cli::kOk);
  const auto fig3 = slurp(dir / "fig3_delay_nodes.csv");
  CHECK(fig3.find("agent,nodes,original_delay,recovery_delay,samples\n") == 0);
  for (const char* n : {",10,", ",15,", ",20,", ",25,"}) CHECK(fig3.find(n) != std::string::npos);
  CHECK(fs::file_size(dir / "fig2_reward_steps.csv") > 0);
  CHECK(fs::file_size(dir / "fig4_steps_distance_hops.csv") > 0);
}
