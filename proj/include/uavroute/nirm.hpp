#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "uavroute/topology.hpp"

namespace uavroute {

struct EdgeImportance {
  int i = 0;  // i < j
  int j = 0;
  int triangles = 0;          // m
  double connectivity = 0.0;  // Z = (k_i - m - 1)(k_j - m - 1)
  double importance = 0.0;    // I = 2Z / (m + 2)
};

struct ImportanceReport {
  std::vector<EdgeImportance> edges;  // ordered by (i, j)
  std::vector<int> degrees;
  std::vector<double> scores;  // L per node id
  std::vector<bool> attacked;
  std::vector<int> ranking;  // L descending, ties by ascending id, attacked nodes last
};

// Common neighbours of i and j. Throws ContractError when (i, j) is not an edge.
int triangle_count(const AdjacencyMatrix& adjacency, int i, int j);

// I = Z * 2 / (m + 2). Throws ContractError when m > min(k_i, k_j) - 1,
// which no simple graph produces.
double link_importance(int k_i, int k_j, int triangles);

// Share of I credited to endpoint i: I * (1 - (k_j - 1) / (k_i + k_j - 2)).
// An isolated pair (k_i = k_j = 1) has I = 0 and gets W = 0.
double link_contribution(double importance, int k_i, int k_j);

// L_i = k_i + sum over neighbours j of W_ij, on the current adjacency.
// `attacked` may be empty; flagged nodes score 0 and rank last.
ImportanceReport node_importance(const AdjacencyMatrix& adjacency,
                                 const std::vector<bool>& attacked = {});
ImportanceReport node_importance(const UavNetwork& network);

enum class AttackModel { deliberate, random };

std::string_view to_string(AttackModel model);
AttackModel parse_attack_model(std::string_view text);

// Deliberate: the first `count` nodes of the ranking that are neither
// protected nor already attacked. Random: a seeded uniform sample without
// replacement from the same eligible set. Throws ContractError when fewer
// than `count` nodes are eligible.
std::vector<int> select_targets(const ImportanceReport& report, int count, AttackModel model,
                                std::span<const int> protected_ids, std::uint64_t seed);

}  // namespace uavroute
