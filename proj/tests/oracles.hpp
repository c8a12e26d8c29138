#pragma once

// Independent reference computations. Nothing here calls into the code
// under test beyond reading adjacency and positions.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include "uavroute/topology.hpp"

namespace oracle {

// Free-space path loss written in its 4*pi*d*g/c form.
inline double fspl_db(double d, double g, double c = 3.0e8) {
  return 20.0 * std::log10(4.0 * std::numbers::pi * d * g / c);
}

inline std::vector<std::vector<int>> to_dense(const uavroute::AdjacencyMatrix& adj) {
  const int n = adj.size();
  std::vector<std::vector<int>> m(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), 0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m[i][j] = (i != j && adj.has_edge(i, j)) ? 1 : 0;
  }
  return m;
}

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational& operator+=(const Rational& o) {
    num = num * o.den + o.num * den;
    den *= o.den;
    const auto g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    return *this;
  }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// Node importance by direct enumeration in exact rational arithmetic:
// W_ij = I (k_i - 1) / (k_i + k_j - 2) with I = 2Z / (m + 2).
inline std::vector<double> node_importance(const uavroute::AdjacencyMatrix& adj) {
  const auto a = to_dense(adj);
  const int n = static_cast<int>(a.size());
  std::vector<int> k(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) k[i] += a[i][j];
  }
  std::vector<double> out;
  for (int i = 0; i < n; ++i) {
    Rational score{k[i], 1};
    for (int j = 0; j < n; ++j) {
      if (!a[i][j]) continue;
      std::int64_t m = 0;
      for (int x = 0; x < n; ++x) m += a[i][x] * a[j][x];
      const std::int64_t z = (k[i] - m - 1) * (k[j] - m - 1);
      const std::int64_t denom = k[i] + k[j] - 2;
      if (denom == 0) continue;
      score += Rational{2 * z * (k[i] - 1), (m + 2) * denom};
    }
    out.push_back(score.value());
  }
  return out;
}

// Union-find connectivity over the un-attacked nodes.
inline bool connected(const uavroute::UavNetwork& net) {
  const int n = net.size();
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (net.adjacency().has_edge(i, j)) parent[find(i)] = find(j);
    }
  }
  int root = -1;
  for (int i = 0; i < n; ++i) {
    if (net.node(i).attacked) continue;
    if (root < 0) root = find(i);
    if (find(i) != root) return false;
  }
  return root >= 0;
}

// Minimum over every simple source-destination path of sum(cost(u, v)).
// Returns +inf when no path exists.
inline double min_simple_path_cost(const uavroute::AdjacencyMatrix& adj, int s, int d,
                                   const std::function<double(int, int)>& cost,
                                   std::vector<int>* best_path = nullptr) {
  const int n = adj.size();
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> path{s};
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  used[s] = true;
  std::function<void(int, double)> walk = [&](int u, double acc) {
    if (u == d) {
      if (acc < best) {
        best = acc;
        if (best_path) *best_path = path;
      }
      return;
    }
    for (int v = 0; v < n; ++v) {
      if (used[v] || v == u || !adj.has_edge(u, v)) continue;
      used[v] = true;
      path.push_back(v);
      walk(v, acc + cost(u, v));
      path.pop_back();
      used[v] = false;
    }
  };
  walk(s, 0.0);
  return best;
}

}  // namespace oracle
