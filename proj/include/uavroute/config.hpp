#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uavroute/agents.hpp"
#include "uavroute/environment.hpp"
#include "uavroute/linkbudget.hpp"
#include "uavroute/nirm.hpp"
#include "uavroute/topology.hpp"

namespace uavroute {

struct AttackEvent {
  int episode = 0;  // applied before this episode starts
  AttackModel model = AttackModel::deliberate;
  int count = 1;
};

struct AgentVariant {
  std::string name;
  AgentKind kind = AgentKind::sarsa_lambda;
  std::optional<double> lambda;  // overrides the learner's lambda
};

// random: a uniformly drawn pair at least `min_hops` apart.
// corners: the nodes nearest the (0, 0) and (area_x, area_y) corners.
enum class EndpointPolicy { random, corners };

std::string_view to_string(EndpointPolicy policy);
EndpointPolicy parse_endpoint_policy(std::string_view text);
std::string_view to_string(QueueAttribution attribution);
QueueAttribution parse_queue_attribution(std::string_view text);

struct ScenarioOptions {
  int queue_min = 1;
  int queue_max = 5;
  std::optional<int> frozen_queue;
  RewardMode reward_mode = RewardMode::literal;
  QueueAttribution queue_attribution = QueueAttribution::receiver;
  EndpointPolicy endpoints = EndpointPolicy::random;
  int min_hops = 2;
  int max_steps = 0;
  double max_hop_delay = std::numeric_limits<double>::infinity();
  double reward_scale = -100.0;
  bool protect_endpoints = true;
  // Reject placements where the attack schedule would cut the source off.
  bool require_recoverable = true;
  int eval_queue = 3;  // frozen packets per node when scoring greedy paths
};

struct MetricsOptions {
  int smoothing_window = 50;
  double threshold = 0.05;
  double tail_fraction = 0.2;
};

// Delay-vs-node-count sweep.
// Seeds first..last inclusive.
std::vector<std::uint64_t> seed_range(std::uint64_t first, std::uint64_t last);

struct SweepOptions {
  bool enabled = true;
  std::vector<int> node_counts{10, 15, 20, 25};
  std::vector<std::uint64_t> seeds = seed_range(1, 300);
  int episodes = 8000;
  int attack_episode = -1;  // -1 selects episodes / 2
  EndpointPolicy endpoints = EndpointPolicy::corners;
};

struct ExperimentConfig {
  TopologyParams topology;
  RadioParams radio;
  LearnerConfig learner;
  ScenarioOptions scenario;
  int episodes = 3000;
  std::vector<AttackEvent> attacks{{1500, AttackModel::deliberate, 1}};
  std::vector<AgentVariant> agents{{"sarsa_lambda", AgentKind::sarsa_lambda, std::nullopt},
                                   {"sarsa", AgentKind::sarsa, std::nullopt},
                                   {"q_learning", AgentKind::q_learning, std::nullopt}};
  std::vector<std::uint64_t> seeds = seed_range(1, 10);
  MetricsOptions metrics;
  SweepOptions sweep;
  std::string output_dir = "out";

  void validate() const;
  LearnerConfig learner_for(const AgentVariant& variant) const;
};

// Parses the YAML document. Unknown keys and type errors raise ConfigError
// naming the key and its line. Keys not given keep the defaults above; when
// `episodes` is given without `attacks`, the single attack moves to
// episodes / 2.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

// Canonical YAML rendering; parse_config(dump_config(c)) reproduces c.
std::string dump_config(const ExperimentConfig& config);

}  // namespace uavroute
