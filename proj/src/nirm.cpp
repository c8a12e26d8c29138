#include "uavroute/nirm.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "uavroute/error.hpp"
#include "uavroute/rng.hpp"

namespace uavroute {

int triangle_count(const AdjacencyMatrix& adjacency, int i, int j) {
  if (i == j || !adjacency.has_edge(i, j)) {
    throw ContractError(fmt::format("({}, {}) is not an edge", i, j));
  }
  int m = 0;
  for (int x = 0; x < adjacency.size(); ++x) {
    if (adjacency.has_edge(i, x) && adjacency.has_edge(j, x)) ++m;
  }
  return m;
}

double link_importance(int k_i, int k_j, int triangles) {
  if (triangles < 0 || triangles > std::min(k_i, k_j) - 1) {
    throw ContractError(fmt::format("{} triangles cannot sit on an edge with degrees {} and {}",
                                    triangles, k_i, k_j));
  }
  const double z = static_cast<double>(k_i - triangles - 1) * static_cast<double>(k_j - triangles - 1);
  return z * 2.0 / (triangles + 2.0);
}

double link_contribution(double importance, int k_i, int k_j) {
  const int denom = k_i + k_j - 2;
  if (denom == 0) return 0.0;
  return importance * (1.0 - static_cast<double>(k_j - 1) / denom);
}

ImportanceReport node_importance(const AdjacencyMatrix& adjacency, const std::vector<bool>& attacked) {
  const int n = adjacency.size();
  ImportanceReport report;
  report.degrees.resize(static_cast<std::size_t>(n));
  report.scores.assign(static_cast<std::size_t>(n), 0.0);
  report.attacked.assign(static_cast<std::size_t>(n), false);
  for (int i = 0; i < n; ++i) {
    report.degrees[static_cast<std::size_t>(i)] = adjacency.degree(i);
    if (!attacked.empty()) report.attacked[static_cast<std::size_t>(i)] = attacked[static_cast<std::size_t>(i)];
  }

  for (int i = 0; i < n; ++i) {
    auto& score = report.scores[static_cast<std::size_t>(i)];
    score = report.degrees[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < n; ++j) {
      if (!adjacency.has_edge(i, j)) continue;
      EdgeImportance e;
      e.i = i;
      e.j = j;
      e.triangles = triangle_count(adjacency, i, j);
      const int k_i = report.degrees[static_cast<std::size_t>(i)];
      const int k_j = report.degrees[static_cast<std::size_t>(j)];
      e.connectivity = static_cast<double>(k_i - e.triangles - 1) * (k_j - e.triangles - 1);
      e.importance = link_importance(k_i, k_j, e.triangles);
      report.edges.push_back(e);
    }
  }
  for (const auto& e : report.edges) {
    const int k_i = report.degrees[static_cast<std::size_t>(e.i)];
    const int k_j = report.degrees[static_cast<std::size_t>(e.j)];
    report.scores[static_cast<std::size_t>(e.i)] += link_contribution(e.importance, k_i, k_j);
    report.scores[static_cast<std::size_t>(e.j)] += link_contribution(e.importance, k_j, k_i);
  }
  for (int i = 0; i < n; ++i) {
    if (report.attacked[static_cast<std::size_t>(i)]) report.scores[static_cast<std::size_t>(i)] = 0.0;
  }

  report.ranking.resize(static_cast<std::size_t>(n));
  std::iota(report.ranking.begin(), report.ranking.end(), 0);
  std::stable_sort(report.ranking.begin(), report.ranking.end(), [&](int a, int b) {
    const bool att_a = report.attacked[static_cast<std::size_t>(a)];
    const bool att_b = report.attacked[static_cast<std::size_t>(b)];
    if (att_a != att_b) return att_b;
    return report.scores[static_cast<std::size_t>(a)] > report.scores[static_cast<std::size_t>(b)];
  });
  return report;
}

ImportanceReport node_importance(const UavNetwork& network) {
  std::vector<bool> attacked;
  for (const auto& node : network.nodes()) attacked.push_back(node.attacked);
  return node_importance(network.adjacency(), attacked);
}

std::string_view to_string(AttackModel model) {
  return model == AttackModel::deliberate ? "deliberate" : "random";
}

AttackModel parse_attack_model(std::string_view text) {
  if (text == "deliberate") return AttackModel::deliberate;
  if (text == "random") return AttackModel::random;
  throw ConfigError(fmt::format("unknown attack model '{}' (deliberate|random)", text));
}

std::vector<int> select_targets(const ImportanceReport& report, int count, AttackModel model,
                                std::span<const int> protected_ids, std::uint64_t seed) {
  if (count < 0) throw ContractError("target count must be non-negative");
  std::vector<int> eligible;
  for (int id : report.ranking) {
    const bool is_protected =
        std::find(protected_ids.begin(), protected_ids.end(), id) != protected_ids.end();
    if (!is_protected && !report.attacked[static_cast<std::size_t>(id)]) eligible.push_back(id);
  }
  if (count > static_cast<int>(eligible.size())) {
    throw ContractError(
        fmt::format("asked for {} targets but only {} nodes are eligible", count, eligible.size()));
  }
  if (model == AttackModel::deliberate) {
    eligible.resize(static_cast<std::size_t>(count));
    return eligible;
  }
  std::sort(eligible.begin(), eligible.end());
  Rng rng(seed);
  for (int k = 0; k < count; ++k) {
    const auto pick = uniform_int(rng, k, static_cast<long long>(eligible.size()) - 1);
    std::swap(eligible[static_cast<std::size_t>(k)], eligible[static_cast<std::size_t>(pick)]);
  }
  eligible.resize(static_cast<std::size_t>(count));
  return eligible;
}

}  // namespace uavroute
