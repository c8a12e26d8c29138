#include "uavroute/topology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "uavroute/error.hpp"
#include "uavroute/rng.hpp"

namespace uavroute {

double euclidean_distance(const Position& a, const Position& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

AdjacencyMatrix::AdjacencyMatrix(int n)
    : n_(n), cells_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0) {
  if (n < 0) throw ContractError("adjacency size must be non-negative");
}

void AdjacencyMatrix::set_edge(int i, int j, bool on) {
  if (i == j) throw ContractError(fmt::format("self-loop on node {}", i));
  cells_[index(i, j)] = on ? 1 : 0;
  cells_[index(j, i)] = on ? 1 : 0;
}

void AdjacencyMatrix::isolate(int i) {
  for (int x = 0; x < n_; ++x) {
    cells_[index(i, x)] = 0;
    cells_[index(x, i)] = 0;
  }
}

int AdjacencyMatrix::degree(int i) const {
  int k = 0;
  for (int x = 0; x < n_; ++x) k += cells_[index(i, x)];
  return k;
}

std::vector<int> AdjacencyMatrix::neighbors(int i) const {
  std::vector<int> out;
  for (int x = 0; x < n_; ++x) {
    if (cells_[index(i, x)] != 0) out.push_back(x);
  }
  return out;
}

int AdjacencyMatrix::edge_count() const {
  int twice = 0;
  for (auto c : cells_) twice += c;
  return twice / 2;
}

AdjacencyMatrix build_adjacency(std::span<const UavNode> nodes, double o_min, double o_max) {
  if (!(o_min < o_max)) {
    throw ConfigError(fmt::format("o_min ({}) must be below o_max ({})", o_min, o_max));
  }
  const int n = static_cast<int>(nodes.size());
  AdjacencyMatrix adj(n);
  for (int i = 0; i < n; ++i) {
    if (nodes[i].attacked) continue;
    for (int j = i + 1; j < n; ++j) {
      if (nodes[j].attacked) continue;
      const double d = euclidean_distance(nodes[i].position, nodes[j].position);
      if (d >= o_min && d <= o_max) adj.set_edge(i, j, true);
    }
  }
  return adj;
}

UavNetwork::UavNetwork(std::vector<UavNode> nodes, double o_min, double o_max)
    : nodes_(std::move(nodes)), o_min_(o_min), o_max_(o_max) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].id != static_cast<int>(i)) {
      throw ContractError(fmt::format("node at index {} carries id {}", i, nodes_[i].id));
    }
    if (nodes_[i].queue_packets < 0) {
      throw ContractError(fmt::format("node {} has a negative queue", i));
    }
  }
  adjacency_ = build_adjacency(nodes_, o_min_, o_max_);
}

double UavNetwork::distance(int i, int j) const {
  return euclidean_distance(node(i).position, node(j).position);
}

std::vector<int> UavNetwork::attacked_ids() const {
  std::vector<int> out;
  for (const auto& n : nodes_) {
    if (n.attacked) out.push_back(n.id);
  }
  return out;
}

void TopologyParams::validate() const {
  if (nodes < 2) throw ConfigError(fmt::format("topology needs at least 2 nodes, got {}", nodes));
  if (!(area_x > 0.0 && area_y > 0.0)) throw ConfigError("topology area must be positive");
  if (z_min > z_max) throw ConfigError("height range is inverted");
  if (!(o_min >= 0.0 && o_min < o_max)) {
    throw ConfigError(fmt::format("need 0 <= o_min < o_max, got ({}, {})", o_min, o_max));
  }
  if (max_retries < 1) throw ConfigError("max_retries must be at least 1");
}

UavNetwork generate_random_topology(const TopologyParams& params, std::uint64_t seed) {
  params.validate();
  Rng rng(seed);
  for (int attempt = 0; attempt < params.max_retries; ++attempt) {
    std::vector<UavNode> nodes(static_cast<std::size_t>(params.nodes));
    for (int i = 0; i < params.nodes; ++i) {
      auto& node = nodes[static_cast<std::size_t>(i)];
      node.id = i;
      node.position.x = uniform_real(rng, 0.0, params.area_x);
      node.position.y = uniform_real(rng, 0.0, params.area_y);
      node.position.z = uniform_real(rng, params.z_min, params.z_max);
    }
    UavNetwork net(std::move(nodes), params.o_min, params.o_max);
    if (is_connected(net)) return net;
  }
  throw ScenarioError(fmt::format(
      "no connected placement of {} nodes in {}x{} m with link range [{}, {}] after {} attempts",
      params.nodes, params.area_x, params.area_y, params.o_min, params.o_max, params.max_retries));
}

UavNetwork apply_attack(const UavNetwork& network, std::span<const int> targets,
                        std::span<const int> protected_ids) {
  std::vector<UavNode> nodes = network.nodes();
  for (int t : targets) {
    if (!network.valid_id(t)) throw ContractError(fmt::format("attack target {} does not exist", t));
    if (std::find(protected_ids.begin(), protected_ids.end(), t) != protected_ids.end()) {
      throw ContractError(fmt::format("attack target {} is a protected endpoint", t));
    }
    nodes[static_cast<std::size_t>(t)].attacked = true;
  }
  return UavNetwork(std::move(nodes), network.o_min(), network.o_max());
}

std::vector<int> bfs_hops(const AdjacencyMatrix& adjacency, int from) {
  std::vector<int> hops(static_cast<std::size_t>(adjacency.size()), -1);
  std::deque<int> frontier{from};
  hops[static_cast<std::size_t>(from)] = 0;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop_front();
    for (int v : adjacency.neighbors(u)) {
      if (hops[static_cast<std::size_t>(v)] < 0) {
        hops[static_cast<std::size_t>(v)] = hops[static_cast<std::size_t>(u)] + 1;
        frontier.push_back(v);
      }
    }
  }
  return hops;
}

bool reachable(const AdjacencyMatrix& adjacency, int from, int to) {
  return bfs_hops(adjacency, from)[static_cast<std::size_t>(to)] >= 0;
}

bool is_connected(const UavNetwork& network) {
  int start = -1;
  for (const auto& n : network.nodes()) {
    if (!n.attacked) {
      start = n.id;
      break;
    }
  }
  if (start < 0) return false;
  const auto hops = bfs_hops(network.adjacency(), start);
  for (const auto& n : network.nodes()) {
    if (!n.attacked && hops[static_cast<std::size_t>(n.id)] < 0) return false;
  }
  return true;
}

// Format:
//   uavroute-topology 1
//   o_min <meters>
//   o_max <meters>
//   nodes <count>
//   <id> <x> <y> <z> <attacked 0|1>   (one line per node)
void save_topology(const UavNetwork& network, std::ostream& out) {
  out << "uavroute-topology 1\n";
  out << fmt::format("o_min {:.17g}\no_max {:.17g}\nnodes {}\n", network.o_min(), network.o_max(),
                     network.size());
  for (const auto& n : network.nodes()) {
    out << fmt::format("{} {:.17g} {:.17g} {:.17g} {}\n", n.id, n.position.x, n.position.y,
                       n.position.z, n.attacked ? 1 : 0);
  }
}

namespace {

std::string next_line(std::istream& in, int& line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    return line;
  }
  throw IoError(fmt::format("topology: unexpected end of input after line {}", line_no));
}

template <typename T>
T header_value(std::istream& in, int& line_no, const std::string& key) {
  std::istringstream fields(next_line(in, line_no));
  std::string got;
  T value{};
  if (!(fields >> got >> value) || got != key) {
    throw IoError(fmt::format("topology line {}: expected '{} <value>'", line_no, key));
  }
  return value;
}

}  // namespace

UavNetwork load_topology(std::istream& in) {
  int line_no = 0;
  {
    std::istringstream magic(next_line(in, line_no));
    std::string tag;
    int version = 0;
    if (!(magic >> tag >> version) || tag != "uavroute-topology" || version != 1) {
      throw IoError("topology: missing 'uavroute-topology 1' header");
    }
  }
  const auto o_min = header_value<double>(in, line_no, "o_min");
  const auto o_max = header_value<double>(in, line_no, "o_max");
  const auto count = header_value<int>(in, line_no, "nodes");
  if (count < 0) throw IoError("topology: negative node count");
  std::vector<UavNode> nodes;
  nodes.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    std::istringstream fields(next_line(in, line_no));
    UavNode node;
    int attacked = 0;
    if (!(fields >> node.id >> node.position.x >> node.position.y >> node.position.z >> attacked)) {
      throw IoError(fmt::format("topology line {}: expected 'id x y z attacked'", line_no));
    }
    if (node.id != i) {
      throw IoError(fmt::format("topology line {}: expected node id {}, got {}", line_no, i, node.id));
    }
    node.attacked = attacked != 0;
    nodes.push_back(node);
  }
  try {
    return UavNetwork(std::move(nodes), o_min, o_max);
  } catch (const ConfigError& e) {
    throw IoError(fmt::format("topology: {}", e.what()));
  }
}

void save_topology_file(const UavNetwork& network, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path));
  save_topology(network, out);
  if (!out) throw IoError(fmt::format("failed writing '{}'", path));
}

UavNetwork load_topology_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path));
  return load_topology(in);
}

}  // namespace uavroute
