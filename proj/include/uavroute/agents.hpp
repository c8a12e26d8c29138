#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uavroute/environment.hpp"
#include "uavroute/rng.hpp"

namespace uavroute {

struct LearnerConfig {
  double alpha = 0.01;
  double gamma = 0.9;
  double lambda = 0.9;
  double epsilon = 0.001;
  double q_init = 0.0;
  double trace_prune = 1e-8;

  // alpha in (0, 1], gamma in (0, 1), lambda in [0, 1), epsilon in [0, 1].
  // lambda = 0 is accepted so Sarsa(0) can be checked against plain Sarsa.
  void validate() const;
};

// Action values indexed by (current node, next node).
class QTable {
 public:
  QTable() = default;
  QTable(int nodes, double init);

  int size() const { return n_; }
  double operator()(int s, int a) const { return values_[index(s, a)]; }
  double& operator()(int s, int a) { return values_[index(s, a)]; }
  std::span<const double> values() const { return values_; }

  friend bool operator==(const QTable&, const QTable&) = default;

 private:
  std::size_t index(int s, int a) const {
    return static_cast<std::size_t>(s) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(a);
  }

  int n_ = 0;
  std::vector<double> values_;
};

// Accumulating eligibility traces. Only pairs with a trace at or above
// the prune threshold are stored.
class TraceTable {
 public:
  struct Entry {
    int s;
    int a;
    double e;
  };

  TraceTable() = default;
  explicit TraceTable(int nodes);

  double get(int s, int a) const;
  // E(s, a) += 1.
  void visit(int s, int a);
  // Q += step * E for every live pair, then E *= decay; pairs dropping
  // below `prune` are removed.
  void apply_and_decay(QTable& q, double step, double decay, double prune);
  void decay(double factor, double prune);
  void clear();
  std::size_t active() const { return entries_.size(); }
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  int n_ = 0;
  std::vector<Entry> entries_;
  std::vector<int> slot_;  // (s, a) -> position in entries_, or -1
};

enum class AgentKind { sarsa_lambda, sarsa, q_learning };

std::string_view to_string(AgentKind kind);
AgentKind parse_agent_kind(std::string_view text);

// Uniform valid action with probability epsilon, otherwise the highest
// value with ties going to the lowest id. Always consumes one uniform draw
// (plus one index draw when exploring). Throws ContractError on an empty set.
int epsilon_greedy(const QTable& q, int state, std::span<const int> valid, double epsilon, Rng& rng);

// r + gamma * q_next - q_curr. Pass q_next = 0 for terminal transitions.
double td_error(double reward, double q_next, double q_curr, double gamma);

struct Transition {
  int s = 0;
  int a = 0;
  double reward = 0.0;
  int next_s = 0;
  int next_a = -1;  // ignored when terminal
  bool terminal = false;
};

// Q(s, a) += alpha * delta with the on-policy bootstrap Q(s', a').
void sarsa_step_update(QTable& q, const Transition& t, double alpha, double gamma);

// Same with the bootstrap max over `next_valid` (0 when terminal or empty).
void q_learning_step_update(QTable& q, const Transition& t, std::span<const int> next_valid,
                            double alpha, double gamma);

struct EpisodeLog {
  int episode = 0;
  std::string agent;
  std::uint64_t seed = 0;
  double total_reward = 0.0;
  int steps = 0;
  std::vector<int> path;
  std::vector<double> rewards;
  std::vector<int> queues;  // per node, as sampled at reset
  double path_distance = 0.0;
  double path_delay = 0.0;
  Termination termination = Termination::none;

  bool completed() const { return termination == Termination::reached; }
};

// One training episode. For sarsa_lambda the traces are cleared first and
// each step runs: observe (r, s'), pick a' epsilon-greedily, delta,
// E(s, a) += 1, then Q += alpha * delta * E and E *= gamma * lambda over
// every live pair.
EpisodeLog run_episode(AgentKind kind, RoutingEnvironment& env, QTable& q, TraceTable& traces,
                       const LearnerConfig& config, Rng& rng);

EpisodeLog sarsa_lambda_episode(RoutingEnvironment& env, QTable& q, TraceTable& traces,
                                const LearnerConfig& config, Rng& rng);

enum class PathStatus { reached, cycle, dead_end, step_limit };

std::string_view to_string(PathStatus status);

struct GreedyPath {
  PathStatus status = PathStatus::dead_end;
  std::vector<int> path;

  bool ok() const { return status == PathStatus::reached; }
};

// Follows argmax actions (lowest id on ties) over un-attacked neighbours.
GreedyPath greedy_policy_path(const QTable& q, const UavNetwork& network, int source,
                              int destination, int max_steps);

// Delimited matrix with a header row of node ids and one row per state.
void save_qtable(const QTable& q, std::ostream& out);
QTable load_qtable(std::istream& in);

}  // namespace uavroute
