#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "uavroute/error.hpp"
#include "uavroute/nirm.hpp"

using namespace uavroute;

TEST_CASE("triangle count") {
  const auto k3 = fixtures::complete(3);
  CHECK(triangle_count(k3, 0, 1) == 1);
  CHECK(triangle_count(fixtures::complete(4), 1, 3) == 2);
  const auto bridge = fixtures::two_triangle_bridge();
  CHECK(triangle_count(bridge, 2, 3) == 0);
  CHECK(triangle_count(bridge, 0, 2) == 1);
  CHECK_THROWS_AS(triangle_count(bridge, 0, 5), ContractError);
}

TEST_CASE("link importance") {
  CHECK(link_importance(1, 4, 0) == 0.0);
  CHECK(link_importance(3, 3, 0) == 4.0);
  CHECK(link_importance(2, 2, 1) == 0.0);
  CHECK(link_importance(5, 4, 1) == doctest::Approx(2.0 * 3 * 2 / 3));
  CHECK_THROWS_AS(link_importance(2, 5, 2), ContractError);
}

TEST_CASE("link contribution") {
  CHECK(link_contribution(0, 7, 3) == 0.0);
  CHECK(link_contribution(4, 3, 3) == 2.0);
  CHECK(link_contribution(0, 1, 1) == 0.0);
}

TEST_CASE("node importance examples") {
  const auto r = node_importance(fixtures::two_triangle_bridge());
  CHECK(r.scores == std::vector<double>{2, 2, 5, 5, 2, 2});
  CHECK(r.ranking == std::vector<int>{2, 3, 0, 1, 4, 5});
  REQUIRE(r.edges.size() == 7);
  const auto bridge_edge = std::find_if(r.edges.begin(), r.edges.end(),
                                        [](const EdgeImportance& e) { return e.i == 2 && e.j == 3; });
  REQUIRE(bridge_edge != r.edges.end());
  CHECK(bridge_edge->triangles == 0);
  CHECK(bridge_edge->connectivity == 4.0);
  CHECK(bridge_edge->importance == 4.0);

  CHECK(node_importance(fixtures::complete(3)).scores == std::vector<double>{2, 2, 2});
  CHECK(node_importance(fixtures::from_edges(2, {{0, 1}})).scores == std::vector<double>{1, 1});
  CHECK(node_importance(AdjacencyMatrix(3)).scores == std::vector<double>{0, 0, 0});
}

TEST_CASE("geometric bridge matches the abstract graph") {
  const auto net = fixtures::bridge_network();
  CHECK(net.adjacency() == fixtures::two_triangle_bridge());
}

TEST_CASE("attacked nodes score zero and rank last") {
  const auto net = apply_attack(fixtures::bridge_network(), std::vector<int>{2});
  const auto r = node_importance(net);
  CHECK(r.scores[2] == 0.0);
  CHECK(r.ranking.back() == 2);
  CHECK(r.attacked[2]);
  const auto again = select_targets(r, 1, AttackModel::deliberate, {}, 0);
  CHECK(again == std::vector<int>{3});
}

TEST_CASE("node importance matches rational brute force") {
  Rng rng(2024);
  for (int t = 0; t < 300; ++t) {
    const int n = 1 + static_cast<int>(uniform_int(rng, 0, 7));
    const auto adj = fixtures::random_graph(n, uniform_real(rng, 0.1, 0.9), rng);
    const auto got = node_importance(adj).scores;
    const auto want = oracle::node_importance(adj);
    REQUIRE(got.size() == want.size());
    for (int i = 0; i < n; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
  }
}

TEST_CASE("edge importance matches naive enumeration") {
  Rng rng(77);
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + static_cast<int>(uniform_int(rng, 0, 6));
    const auto adj = fixtures::random_graph(n, 0.6, rng);
    const auto dense = oracle::to_dense(adj);
    for (const auto& e : node_importance(adj).edges) {
      int m = 0;
      int ki = 0;
      int kj = 0;
      for (int x = 0; x < n; ++x) {
        m += dense[e.i][x] && dense[e.j][x];
        ki += dense[e.i][x];
        kj += dense[e.j][x];
      }
      CHECK(e.triangles == m);
      CHECK(e.importance == doctest::Approx(2.0 * (ki - m - 1) * (kj - m - 1) / (m + 2)).epsilon(1e-12));
    }
  }
}

TEST_CASE("relabeling permutes scores") {
  Rng rng(9);
  for (int t = 0; t < 50; ++t) {
    const int n = 3 + static_cast<int>(uniform_int(rng, 0, 5));
    const auto adj = fixtures::random_graph(n, 0.5, rng);
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[uniform_int(rng, 0, static_cast<std::uint64_t>(i))]);
    AdjacencyMatrix relabeled(n);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (adj.has_edge(i, j)) relabeled.set_edge(perm[i], perm[j], true);
      }
    }
    const auto a = node_importance(adj).scores;
    const auto b = node_importance(relabeled).scores;
    for (int i = 0; i < n; ++i) CHECK(b[perm[i]] == doctest::Approx(a[i]).epsilon(1e-12));
  }
}

TEST_CASE("ranking is a permutation") {
  Rng rng(4);
  const auto adj = fixtures::random_graph(8, 0.4, rng);
  auto ranking = node_importance(adj).ranking;
  std::sort(ranking.begin(), ranking.end());
  std::vector<int> ids(8);
  std::iota(ids.begin(), ids.end(), 0);
  CHECK(ranking == ids);
}

TEST_CASE("target selection") {
  const auto r = node_importance(fixtures::two_triangle_bridge());
  CHECK(select_targets(r, 1, AttackModel::deliberate, {}, 0) == std::vector<int>{2});
  CHECK(select_targets(r, 0, AttackModel::deliberate, {}, 0).empty());
  const std::vector<int> protect{2};
  CHECK(select_targets(r, 1, AttackModel::deliberate, protect, 0) == std::vector<int>{3});

  const auto a = select_targets(r, 2, AttackModel::random, {}, 42);
  CHECK(a.size() == 2);
  CHECK(a == select_targets(r, 2, AttackModel::random, {}, 42));
  CHECK(a[0] != a[1]);

  CHECK_THROWS_AS(select_targets(r, 7, AttackModel::deliberate, {}, 0), ContractError);
  CHECK_THROWS_AS(select_targets(r, 6, AttackModel::random, protect, 0), ContractError);
}

TEST_CASE("deliberate targets are non-increasing and skip attacked nodes") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto net = generate_random_topology(TopologyParams{}, seed);
    const auto first = select_targets(node_importance(net), 3, AttackModel::random, {}, seed);
    net = apply_attack(net, first);
    const auto report = node_importance(net);
    const auto next = select_targets(report, 5, AttackModel::deliberate, {}, 0);
    for (std::size_t k = 0; k + 1 < next.size(); ++k) {
      CHECK(report.scores[next[k]] >= report.scores[next[k + 1]]);
    }
    for (int t : next) CHECK_FALSE(net.node(t).attacked);
    for (int t : select_targets(report, 5, AttackModel::random, {}, seed)) CHECK_FALSE(net.node(t).attacked);
  }
}

TEST_CASE("attack model names") {
  CHECK(parse_attack_model("deliberate") == AttackModel::deliberate);
  CHECK(to_string(AttackModel::random) == "random");
  CHECK_THROWS_AS(parse_attack_model("targeted"), ConfigError);
}
