#include "uavroute/agents.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "uavroute/error.hpp"

namespace uavroute {

void LearnerConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError(fmt::format("alpha {} outside (0, 1]", alpha));
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError(fmt::format("gamma {} outside (0, 1)", gamma));
  if (!(lambda >= 0.0 && lambda < 1.0)) {
    throw ConfigError(fmt::format("lambda {} outside [0, 1)", lambda));
  }
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw ConfigError(fmt::format("epsilon {} outside [0, 1]", epsilon));
  }
  if (!(trace_prune >= 0.0)) throw ConfigError("trace_prune must be non-negative");
}

QTable::QTable(int nodes, double init)
    : n_(nodes), values_(static_cast<std::size_t>(nodes) * static_cast<std::size_t>(nodes), init) {}

TraceTable::TraceTable(int nodes)
    : n_(nodes), slot_(static_cast<std::size_t>(nodes) * static_cast<std::size_t>(nodes), -1) {}

double TraceTable::get(int s, int a) const {
  const int k = slot_[static_cast<std::size_t>(s * n_ + a)];
  return k < 0 ? 0.0 : entries_[static_cast<std::size_t>(k)].e;
}

void TraceTable::visit(int s, int a) {
  int& k = slot_[static_cast<std::size_t>(s * n_ + a)];
  if (k < 0) {
    k = static_cast<int>(entries_.size());
    entries_.push_back({s, a, 0.0});
  }
  entries_[static_cast<std::size_t>(k)].e += 1.0;
}

void TraceTable::apply_and_decay(QTable& q, double step, double decay, double prune) {
  for (const auto& entry : entries_) q(entry.s, entry.a) += step * entry.e;
  this->decay(decay, prune);
}

void TraceTable::decay(double factor, double prune) {
  std::size_t kept = 0;
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    Entry entry = entries_[k];
    entry.e *= factor;
    if (entry.e < prune || entry.e == 0.0) {
      slot_[static_cast<std::size_t>(entry.s * n_ + entry.a)] = -1;
      continue;
    }
    slot_[static_cast<std::size_t>(entry.s * n_ + entry.a)] = static_cast<int>(kept);
    entries_[kept++] = entry;
  }
  entries_.resize(kept);
}

void TraceTable::clear() {
  for (const auto& entry : entries_) slot_[static_cast<std::size_t>(entry.s * n_ + entry.a)] = -1;
  entries_.clear();
}

std::string_view to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::sarsa_lambda: return "sarsa_lambda";
    case AgentKind::sarsa: return "sarsa";
    case AgentKind::q_learning: return "q_learning";
  }
  return "?";
}

AgentKind parse_agent_kind(std::string_view text) {
  if (text == "sarsa_lambda") return AgentKind::sarsa_lambda;
  if (text == "sarsa") return AgentKind::sarsa;
  if (text == "q_learning") return AgentKind::q_learning;
  throw ConfigError(fmt::format("unknown agent kind '{}' (sarsa_lambda|sarsa|q_learning)", text));
}

int epsilon_greedy(const QTable& q, int state, std::span<const int> valid, double epsilon, Rng& rng) {
  if (valid.empty()) throw ContractError(fmt::format("node {} has no valid action", state));
  if (uniform01(rng) < epsilon) {
    return valid[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<long long>(valid.size()) - 1))];
  }
  int best = -1;
  for (int a : valid) {
    if (best < 0 || q(state, a) > q(state, best) || (q(state, a) == q(state, best) && a < best)) {
      best = a;
    }
  }
  return best;
}

double td_error(double reward, double q_next, double q_curr, double gamma) {
  return reward + gamma * q_next - q_curr;
}

void sarsa_step_update(QTable& q, const Transition& t, double alpha, double gamma) {
  const double q_next = t.terminal ? 0.0 : q(t.next_s, t.next_a);
  q(t.s, t.a) += alpha * td_error(t.reward, q_next, q(t.s, t.a), gamma);
}

namespace {

double max_value(const QTable& q, int s, std::span<const int> valid) {
  double best = 0.0;
  bool any = false;
  for (int a : valid) {
    if (!any || q(s, a) > best) best = q(s, a);
    any = true;
  }
  return best;
}

}  // namespace

void q_learning_step_update(QTable& q, const Transition& t, std::span<const int> next_valid,
                            double alpha, double gamma) {
  const double q_next = t.terminal ? 0.0 : max_value(q, t.next_s, next_valid);
  q(t.s, t.a) += alpha * td_error(t.reward, q_next, q(t.s, t.a), gamma);
}

EpisodeLog run_episode(AgentKind kind, RoutingEnvironment& env, QTable& q, TraceTable& traces,
                       const LearnerConfig& config, Rng& rng) {
  EpisodeLog log;
  log.agent = std::string(to_string(kind));
  if (kind == AgentKind::sarsa_lambda) traces.clear();

  RoutingState state = env.reset(rng);
  log.queues = env.queues();
  log.path.push_back(state.current);

  if (auto stop = env.abort_rules(state, 0)) {
    log.termination = stop->termination;
    log.total_reward = stop->reward;
    if (stop->reward != 0.0) log.rewards.push_back(stop->reward);
    return log;
  }

  const double trace_decay = config.gamma * config.lambda;
  int action = epsilon_greedy(q, state.current, env.valid_actions(state), config.epsilon, rng);
  for (;;) {
    const StepOutcome out = env.step(state, action);
    ++log.steps;
    log.path.push_back(out.next_state.current);

    Transition t{state.current, action, out.reward, out.next_state.current, -1, out.done};
    Termination termination = out.termination;
    if (!out.done) {
      if (auto stop = env.abort_rules(out.next_state, log.steps)) {
        termination = stop->termination;
        if (termination == Termination::dead_end) {
          t.reward += stop->reward;
          t.terminal = true;
        }
      }
    }
    const bool ends = termination != Termination::none;
    const std::vector<int> next_valid =
        t.terminal ? std::vector<int>{} : env.valid_actions(out.next_state);

    switch (kind) {
      case AgentKind::sarsa_lambda: {
        if (!t.terminal) t.next_a = epsilon_greedy(q, t.next_s, next_valid, config.epsilon, rng);
        const double q_next = t.terminal ? 0.0 : q(t.next_s, t.next_a);
        const double delta = td_error(t.reward, q_next, q(t.s, t.a), config.gamma);
        traces.visit(t.s, t.a);
        traces.apply_and_decay(q, config.alpha * delta, trace_decay, config.trace_prune);
        break;
      }
      case AgentKind::sarsa:
        if (!t.terminal) t.next_a = epsilon_greedy(q, t.next_s, next_valid, config.epsilon, rng);
        sarsa_step_update(q, t, config.alpha, config.gamma);
        break;
      case AgentKind::q_learning:
        q_learning_step_update(q, t, next_valid, config.alpha, config.gamma);
        if (!ends) t.next_a = epsilon_greedy(q, t.next_s, next_valid, config.epsilon, rng);
        break;
    }

    log.rewards.push_back(t.reward);
    log.total_reward += t.reward;
    if (ends) {
      log.termination = termination;
      break;
    }
    state = out.next_state;
    action = t.next_a;
  }

  if (log.path.size() >= 2) {
    const auto& spec = env.spec();
    log.path_distance = path_distance(spec.network, log.path);
    log.path_delay = path_delay(spec.network, spec.radio, log.path, log.queues, spec.queue_attribution);
  }
  return log;
}

EpisodeLog sarsa_lambda_episode(RoutingEnvironment& env, QTable& q, TraceTable& traces,
                                const LearnerConfig& config, Rng& rng) {
  return run_episode(AgentKind::sarsa_lambda, env, q, traces, config, rng);
}

std::string_view to_string(PathStatus status) {
  switch (status) {
    case PathStatus::reached: return "reached";
    case PathStatus::cycle: return "cycle";
    case PathStatus::dead_end: return "dead_end";
    case PathStatus::step_limit: return "step_limit";
  }
  return "?";
}

GreedyPath greedy_policy_path(const QTable& q, const UavNetwork& network, int source,
                              int destination, int max_steps) {
  GreedyPath out;
  out.path.push_back(source);
  std::vector<bool> seen(static_cast<std::size_t>(network.size()), false);
  seen[static_cast<std::size_t>(source)] = true;
  int current = source;
  for (int step = 0; step < max_steps; ++step) {
    if (current == destination) {
      out.status = PathStatus::reached;
      return out;
    }
    int best = -1;
    for (int a : network.neighbors(current)) {
      if (network.node(a).attacked) continue;
      if (best < 0 || q(current, a) > q(current, best)) best = a;
    }
    if (best < 0) {
      out.status = PathStatus::dead_end;
      return out;
    }
    out.path.push_back(best);
    if (seen[static_cast<std::size_t>(best)]) {
      out.status = PathStatus::cycle;
      return out;
    }
    seen[static_cast<std::size_t>(best)] = true;
    current = best;
  }
  out.status = current == destination ? PathStatus::reached : PathStatus::step_limit;
  return out;
}

void save_qtable(const QTable& q, std::ostream& out) {
  out << "state";
  for (int a = 0; a < q.size(); ++a) out << ',' << a;
  out << '\n';
  for (int s = 0; s < q.size(); ++s) {
    out << s;
    for (int a = 0; a < q.size(); ++a) out << fmt::format(",{:.17g}", q(s, a));
    out << '\n';
  }
}

namespace {

template <typename T>
T parse_cell(const std::string& cell, int row) {
  T value{};
  const char* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw IoError(fmt::format("q-table: bad value '{}' in row {}", cell, row));
  }
  return value;
}

}  // namespace

QTable load_qtable(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("q-table: empty input");
  const int n = static_cast<int>(std::count(line.begin(), line.end(), ','));
  QTable q(n, 0.0);
  for (int s = 0; s < n; ++s) {
    if (!std::getline(in, line)) throw IoError(fmt::format("q-table: missing row {}", s));
    std::istringstream fields(line);
    std::string cell;
    std::getline(fields, cell, ',');
    if (parse_cell<int>(cell, s) != s) throw IoError(fmt::format("q-table: row {} out of order", s));
    for (int a = 0; a < n; ++a) {
      if (!std::getline(fields, cell, ',')) {
        throw IoError(fmt::format("q-table: row {} has too few columns", s));
      }
      q(s, a) = parse_cell<double>(cell, s);
    }
  }
  return q;
}

}  // namespace uavroute
