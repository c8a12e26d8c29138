#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "uavroute/linkbudget.hpp"
#include "uavroute/rng.hpp"
#include "uavroute/topology.hpp"

namespace uavroute {

// literal: the hop into the destination earns 0 (H_k = 0).
// full_delay: every hop, the last one included, earns scale * delay.
enum class RewardMode { literal, full_delay };

std::string_view to_string(RewardMode mode);
RewardMode parse_reward_mode(std::string_view text);

// The table index is the current node. Distances and queue loads reach the
// agent only through the reward.
struct RoutingState {
  int current = 0;
};

enum class Termination { none, reached, dead_end, truncated };

struct StepOutcome {
  RoutingState next_state;
  double reward = 0.0;
  bool done = false;
  double hop_delay = 0.0;
  Termination termination = Termination::none;
};

struct ScenarioSpec {
  UavNetwork network;
  int source = 0;
  int destination = 1;
  RadioParams radio;
  int queue_min = 1;  // packets, inclusive
  int queue_max = 5;
  std::optional<int> frozen_queue;  // every node holds exactly this many packets
  int max_steps = 0;                // 0 selects 4 * node count
  double reward_scale = -100.0;
  RewardMode reward_mode = RewardMode::literal;
  QueueAttribution queue_attribution = QueueAttribution::receiver;
  double max_hop_delay = std::numeric_limits<double>::infinity();  // (T_p)_max, seconds
  std::optional<double> dead_end_penalty;

  void validate() const;
  int step_cap() const { return max_steps > 0 ? max_steps : 4 * network.size(); }
};

class RoutingEnvironment {
 public:
  explicit RoutingEnvironment(ScenarioSpec spec);

  const ScenarioSpec& spec() const { return spec_; }
  const UavNetwork& network() const { return spec_.network; }
  // Swap in a (typically attacked) network. The endpoints must survive.
  void set_network(UavNetwork network);

  // Starts an episode at the source with freshly sampled queues. Throws
  // ScenarioError when the destination is unreachable.
  RoutingState reset(Rng& rng);
  RoutingState reset(std::uint64_t seed);

  const std::vector<int>& queues() const { return queues_; }

  // Un-attacked neighbours of the current node, ascending.
  std::vector<int> valid_actions(const RoutingState& state) const;

  // Throws ContractError when `action` is not a valid action.
  StepOutcome step(const RoutingState& state, int action) const;

  // Terminal outcome for a dead end or an exhausted step budget, if any.
  std::optional<StepOutcome> abort_rules(const RoutingState& state, int steps_taken) const;

  double hop_delay(int from, int to) const;
  // reward_scale * (T_p)_max, or * the slowest current link when no
  // maximum is configured.
  double dead_end_penalty() const;

 private:
  ScenarioSpec spec_;
  std::vector<int> queues_;
};

}  // namespace uavroute
