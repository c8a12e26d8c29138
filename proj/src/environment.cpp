#include "uavroute/environment.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "uavroute/error.hpp"

namespace uavroute {

std::string_view to_string(RewardMode mode) {
  return mode == RewardMode::literal ? "literal" : "full_delay";
}

RewardMode parse_reward_mode(std::string_view text) {
  if (text == "literal") return RewardMode::literal;
  if (text == "full_delay") return RewardMode::full_delay;
  throw ConfigError(fmt::format("unknown reward mode '{}' (literal|full_delay)", text));
}

void ScenarioSpec::validate() const {
  radio.validate();
  if (!network.valid_id(source) || !network.valid_id(destination)) {
    throw ConfigError(fmt::format("endpoints ({}, {}) outside a {}-node network", source,
                                  destination, network.size()));
  }
  if (source == destination) throw ConfigError("source and destination must differ");
  if (network.node(source).attacked || network.node(destination).attacked) {
    throw ScenarioError("an endpoint is attacked");
  }
  if (queue_min < 0 || queue_min > queue_max) {
    throw ConfigError(fmt::format("bad queue range [{}, {}]", queue_min, queue_max));
  }
  if (frozen_queue && *frozen_queue < 0) throw ConfigError("frozen queue must be non-negative");
  if (max_steps < 0) throw ConfigError("max_steps must be non-negative");
  if (!(max_hop_delay >= 0.0)) throw ConfigError("max_hop_delay must be non-negative");
}

RoutingEnvironment::RoutingEnvironment(ScenarioSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  queues_.assign(static_cast<std::size_t>(spec_.network.size()), spec_.frozen_queue.value_or(0));
}

void RoutingEnvironment::set_network(UavNetwork network) {
  if (network.size() != spec_.network.size()) {
    throw ContractError("replacement network changes the node count");
  }
  spec_.network = std::move(network);
  spec_.validate();
}

RoutingState RoutingEnvironment::reset(Rng& rng) {
  if (!reachable(spec_.network.adjacency(), spec_.source, spec_.destination)) {
    throw ScenarioError(fmt::format("destination {} is unreachable from source {} (attacked: {})",
                                    spec_.destination, spec_.source,
                                    fmt::join(spec_.network.attacked_ids(), ",")));
  }
  for (auto& q : queues_) {
    q = spec_.frozen_queue ? *spec_.frozen_queue
                           : static_cast<int>(uniform_int(rng, spec_.queue_min, spec_.queue_max));
  }
  return RoutingState{spec_.source};
}

RoutingState RoutingEnvironment::reset(std::uint64_t seed) {
  Rng rng(seed);
  return reset(rng);
}

std::vector<int> RoutingEnvironment::valid_actions(const RoutingState& state) const {
  std::vector<int> out;
  for (int v : spec_.network.neighbors(state.current)) {
    if (!spec_.network.node(v).attacked) out.push_back(v);
  }
  return out;
}

double RoutingEnvironment::hop_delay(int from, int to) const {
  const int q = hop_queue(queues_, from, to, spec_.queue_attribution);
  return link_metrics(spec_.network, spec_.radio, from, to, q).hop_delay;
}

StepOutcome RoutingEnvironment::step(const RoutingState& state, int action) const {
  if (!spec_.network.valid_id(action) || !spec_.network.adjacent(state.current, action) ||
      spec_.network.node(action).attacked) {
    throw ContractError(fmt::format("illegal action {} from node {}", action, state.current));
  }
  StepOutcome out;
  out.next_state.current = action;
  out.hop_delay = hop_delay(state.current, action);
  const bool at_goal = action == spec_.destination;
  const double goal_flag = (at_goal && spec_.reward_mode == RewardMode::literal) ? 0.0 : 1.0;
  out.reward = spec_.reward_scale * out.hop_delay * goal_flag;
  out.done = at_goal;
  out.termination = at_goal ? Termination::reached : Termination::none;
  return out;
}

std::optional<StepOutcome> RoutingEnvironment::abort_rules(const RoutingState& state,
                                                           int steps_taken) const {
  if (state.current == spec_.destination) return std::nullopt;
  StepOutcome out;
  out.next_state = state;
  out.done = true;
  if (valid_actions(state).empty()) {
    out.reward = dead_end_penalty();
    out.termination = Termination::dead_end;
    return out;
  }
  if (steps_taken >= spec_.step_cap()) {
    out.termination = Termination::truncated;
    return out;
  }
  return std::nullopt;
}

double RoutingEnvironment::dead_end_penalty() const {
  if (spec_.dead_end_penalty) return *spec_.dead_end_penalty;
  if (std::isfinite(spec_.max_hop_delay)) return spec_.reward_scale * spec_.max_hop_delay;
  double worst = 0.0;
  const int n = spec_.network.size();
  for (int i = 0; i < n; ++i) {
    for (int j : spec_.network.neighbors(i)) worst = std::max(worst, hop_delay(i, j));
  }
  return spec_.reward_scale * worst;
}

}  // namespace uavroute
