#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "uavroute/config.hpp"
#include "uavroute/rng.hpp"
#include "uavroute/topology.hpp"

namespace fixtures {

using uavroute::AdjacencyMatrix;
using uavroute::Position;
using uavroute::UavNetwork;
using uavroute::UavNode;

inline AdjacencyMatrix from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
  AdjacencyMatrix adj(n);
  for (auto [i, j] : edges) adj.set_edge(i, j, true);
  return adj;
}

// Triangles {0,1,2} and {3,4,5} joined by the bridge 2-3.
inline AdjacencyMatrix two_triangle_bridge() {
  return from_edges(6, {{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}, {2, 3}});
}

inline AdjacencyMatrix complete(int n) {
  AdjacencyMatrix adj(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) adj.set_edge(i, j, true);
  }
  return adj;
}

inline UavNetwork from_positions(const std::vector<Position>& positions, double o_min = 30.0,
                                 double o_max = 500.0) {
  std::vector<UavNode> nodes;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    nodes.push_back(UavNode{static_cast<int>(i), positions[i], false, 0});
  }
  return UavNetwork(std::move(nodes), o_min, o_max);
}

// 0 - 1 - 2 along x; the ends are 2 * spacing apart, beyond range.
inline UavNetwork line_network(double spacing = 300.0) {
  return from_positions({{0, 0, 130}, {spacing, 0, 130}, {2 * spacing, 0, 130}});
}

// Geometric realisation of two_triangle_bridge() under the default range.
inline UavNetwork bridge_network() {
  return from_positions({{0, 0, 130},
                         {100, 0, 130},
                         {50, 86.6, 130},
                         {50, 566.6, 130},
                         {0, 653.2, 130},
                         {100, 653.2, 130}});
}

inline AdjacencyMatrix random_graph(int n, double p, uavroute::Rng& rng) {
  AdjacencyMatrix adj(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (uavroute::uniform01(rng) < p) adj.set_edge(i, j, true);
    }
  }
  return adj;
}

// Small desk-scale config used by the faster integration tests.
inline uavroute::ExperimentConfig small_config() {
  uavroute::ExperimentConfig c;
  c.topology.nodes = 8;
  c.episodes = 400;
  c.attacks = {{200, uavroute::AttackModel::deliberate, 1}};
  c.seeds = {1, 2};
  c.sweep.enabled = false;
  return c;
}

}  // namespace fixtures
