#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace uavroute {

struct Position {
  double x = 0.0;  // meters
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Position&, const Position&) = default;
};

struct UavNode {
  int id = 0;
  Position position;
  bool attacked = false;
  int queue_packets = 0;

  friend bool operator==(const UavNode&, const UavNode&) = default;
};

double euclidean_distance(const Position& a, const Position& b);

// Symmetric 0/1 matrix with an empty diagonal.
class AdjacencyMatrix {
 public:
  AdjacencyMatrix() = default;
  explicit AdjacencyMatrix(int n);

  int size() const { return n_; }
  bool has_edge(int i, int j) const { return cells_[index(i, j)] != 0; }
  void set_edge(int i, int j, bool on);
  // Zeroes row i and column i.
  void isolate(int i);

  int degree(int i) const;
  // Neighbors of i in ascending id order.
  std::vector<int> neighbors(int i) const;
  int edge_count() const;

  friend bool operator==(const AdjacencyMatrix&, const AdjacencyMatrix&) = default;

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
  }

  int n_ = 0;
  std::vector<std::uint8_t> cells_;
};

// Links exist iff i != j, neither endpoint is attacked and
// o_min <= d(i, j) <= o_max. Throws ConfigError when o_min >= o_max.
AdjacencyMatrix build_adjacency(std::span<const UavNode> nodes, double o_min, double o_max);

// The UAV graph. Adjacency is always derived from positions and attack
// flags; there is no way to set an edge directly.
class UavNetwork {
 public:
  UavNetwork() = default;
  // Ids must equal positions in the list (0..n-1).
  UavNetwork(std::vector<UavNode> nodes, double o_min, double o_max);

  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<UavNode>& nodes() const { return nodes_; }
  const UavNode& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  const AdjacencyMatrix& adjacency() const { return adjacency_; }
  double o_min() const { return o_min_; }
  double o_max() const { return o_max_; }

  bool adjacent(int i, int j) const { return adjacency_.has_edge(i, j); }
  std::vector<int> neighbors(int i) const { return adjacency_.neighbors(i); }
  double distance(int i, int j) const;
  bool valid_id(int id) const { return id >= 0 && id < size(); }
  std::vector<int> attacked_ids() const;

  friend bool operator==(const UavNetwork&, const UavNetwork&) = default;

 private:
  std::vector<UavNode> nodes_;
  double o_min_ = 0.0;
  double o_max_ = 0.0;
  AdjacencyMatrix adjacency_;
};

struct TopologyParams {
  int nodes = 20;
  double area_x = 1000.0;
  double area_y = 1000.0;
  double z_min = 130.0;
  double z_max = 140.0;
  double o_min = 30.0;
  double o_max = 500.0;
  int max_retries = 1000;

  void validate() const;
};

// Uniform placement over area x height range, resampled until the graph is
// connected. Throws ScenarioError once max_retries placements have failed.
UavNetwork generate_random_topology(const TopologyParams& params, std::uint64_t seed);

// Attack flags set and incident links removed for every target. Throws
// ContractError for unknown ids or ids listed in `protected_ids`.
UavNetwork apply_attack(const UavNetwork& network, std::span<const int> targets,
                        std::span<const int> protected_ids = {});

// Hop distances from `from` (-1 for unreachable nodes).
std::vector<int> bfs_hops(const AdjacencyMatrix& adjacency, int from);
bool reachable(const AdjacencyMatrix& adjacency, int from, int to);
// True when every un-attacked node can reach every other.
bool is_connected(const UavNetwork& network);

// Text serialization. Adjacency is not stored; load() rebuilds it from the
// positions so the distance gate stays authoritative.
void save_topology(const UavNetwork& network, std::ostream& out);
UavNetwork load_topology(std::istream& in);
void save_topology_file(const UavNetwork& network, const std::string& path);
UavNetwork load_topology_file(const std::string& path);

}  // namespace uavroute
