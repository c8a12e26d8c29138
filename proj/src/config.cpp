#include "uavroute/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "uavroute/error.hpp"

namespace uavroute {

std::string_view to_string(EndpointPolicy policy) {
  return policy == EndpointPolicy::random ? "random" : "corners";
}

EndpointPolicy parse_endpoint_policy(std::string_view text) {
  if (text == "random") return EndpointPolicy::random;
  if (text == "corners") return EndpointPolicy::corners;
  throw ConfigError(fmt::format("unknown endpoint policy '{}' (random|corners)", text));
}

std::string_view to_string(QueueAttribution attribution) {
  return attribution == QueueAttribution::receiver ? "receiver" : "sender";
}

QueueAttribution parse_queue_attribution(std::string_view text) {
  if (text == "receiver") return QueueAttribution::receiver;
  if (text == "sender") return QueueAttribution::sender;
  throw ConfigError(fmt::format("unknown queue attribution '{}' (receiver|sender)", text));
}

void ExperimentConfig::validate() const {
  topology.validate();
  radio.validate();
  learner.validate();
  for (const auto& v : agents) learner_for(v).validate();
  if (episodes < 1) throw ConfigError("episodes must be at least 1");
  int previous = -1;
  for (const auto& a : attacks) {
    if (a.episode <= previous || a.episode >= episodes) {
      throw ConfigError(fmt::format(
          "attack episodes must be strictly increasing within [0, {}), got {}", episodes, a.episode));
    }
    if (a.count < 0) throw ConfigError("attack count must be non-negative");
    previous = a.episode;
  }
  if (agents.empty()) throw ConfigError("at least one agent variant is required");
  std::set<std::string> names;
  for (const auto& v : agents) {
    if (!names.insert(v.name).second) throw ConfigError(fmt::format("duplicate agent name '{}'", v.name));
  }
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  const auto& s = scenario;
  if (s.queue_min < 0 || s.queue_min > s.queue_max) {
    throw ConfigError(fmt::format("bad queue range [{}, {}]", s.queue_min, s.queue_max));
  }
  if (s.min_hops < 1) throw ConfigError("min_hops must be at least 1");
  if (s.eval_queue < 0) throw ConfigError("eval_queue must be non-negative");
  if (metrics.smoothing_window < 1) throw ConfigError("smoothing_window must be at least 1");
  if (!(metrics.tail_fraction > 0.0 && metrics.tail_fraction <= 1.0)) {
    throw ConfigError("tail_fraction must lie in (0, 1]");
  }
  if (sweep.enabled) {
    if (sweep.episodes < 2) throw ConfigError("sweep.episodes must be at least 2");
    if (sweep.attack_episode >= sweep.episodes) {
      throw ConfigError("sweep.attack_episode must be below sweep.episodes");
    }
    for (int n : sweep.node_counts) {
      if (n < 3) throw ConfigError("sweep node counts must be at least 3");
    }
  }
}

LearnerConfig ExperimentConfig::learner_for(const AgentVariant& variant) const {
  LearnerConfig c = learner;
  if (variant.lambda) c.lambda = *variant.lambda;
  return c;
}

std::vector<std::uint64_t> seed_range(std::uint64_t first, std::uint64_t last) {
  std::vector<std::uint64_t> out;
  for (auto s = first; s <= last; ++s) out.push_back(s);
  return out;
}

namespace {

std::string where(const YAML::Node& node) {
  const auto mark = node.Mark();
  return mark.line >= 0 ? fmt::format("line {}", mark.line + 1) : std::string("unknown line");
}

void check_keys(const YAML::Node& map, std::initializer_list<std::string_view> allowed,
                const std::string& section) {
  if (!map.IsMap()) throw ConfigError(fmt::format("'{}' ({}) must be a mapping", section, where(map)));
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(fmt::format("unknown key '{}{}' ({})", section.empty() ? "" : section + ".",
                                    key, where(kv.first)));
    }
  }
}

template <typename T>
T convert(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(fmt::format("bad value for '{}' ({})", key, where(node)));
  }
}

template <typename T>
void read(const YAML::Node& map, const char* key, T& out, const std::string& section) {
  if (const auto node = map[key]) out = convert<T>(node, section.empty() ? key : section + "." + key);
}

template <typename T>
void read_pair(const YAML::Node& map, const char* key, T& first, T& second,
               const std::string& section) {
  const auto node = map[key];
  if (!node) return;
  const auto name = section + "." + key;
  if (!node.IsSequence() || node.size() != 2) {
    throw ConfigError(fmt::format("'{}' ({}) must be a two-element list", name, where(node)));
  }
  first = convert<T>(node[0], name);
  second = convert<T>(node[1], name);
}

template <typename T, typename Parse>
void read_enum(const YAML::Node& map, const char* key, T& out, const std::string& section,
               Parse parse) {
  const auto node = map[key];
  if (!node) return;
  const auto name = section + "." + key;
  try {
    out = parse(convert<std::string>(node, name));
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("'{}' ({}): {}", name, where(node), e.what()));
  }
}

std::vector<std::uint64_t> read_seeds(const YAML::Node& node, const std::string& name) {
  if (node.IsMap()) {
    check_keys(node, {"from", "to"}, name);
    if (!node["from"] || !node["to"]) {
      throw ConfigError(fmt::format("'{}' ({}) needs both 'from' and 'to'", name, where(node)));
    }
    const auto first = convert<std::uint64_t>(node["from"], name + ".from");
    const auto last = convert<std::uint64_t>(node["to"], name + ".to");
    if (last < first) throw ConfigError(fmt::format("'{}' ({}): 'to' is below 'from'", name, where(node)));
    return seed_range(first, last);
  }
  if (!node.IsSequence()) throw ConfigError(fmt::format("'{}' ({}) must be a list or a range", name, where(node)));
  std::vector<std::uint64_t> out;
  for (const auto& item : node) out.push_back(convert<std::uint64_t>(item, name));
  return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(fmt::format("config parse error at line {}: {}", e.mark.line + 1, e.msg));
  }
  ExperimentConfig c;
  if (root.IsNull()) {
    c.validate();
    return c;
  }
  check_keys(root,
             {"episodes", "seeds", "output_dir", "topology", "radio", "learner", "scenario",
              "attacks", "agents", "metrics", "sweep"},
             "");
  read(root, "episodes", c.episodes, "");
  read(root, "output_dir", c.output_dir, "");
  if (const auto seeds = root["seeds"]) c.seeds = read_seeds(seeds, "seeds");

  if (const auto t = root["topology"]) {
    check_keys(t, {"nodes", "area", "heights", "o_min", "o_max", "max_retries"}, "topology");
    read(t, "nodes", c.topology.nodes, "topology");
    read_pair(t, "area", c.topology.area_x, c.topology.area_y, "topology");
    read_pair(t, "heights", c.topology.z_min, c.topology.z_max, "topology");
    read(t, "o_min", c.topology.o_min, "topology");
    read(t, "o_max", c.topology.o_max, "topology");
    read(t, "max_retries", c.topology.max_retries, "topology");
  }
  if (const auto r = root["radio"]) {
    check_keys(r, {"frequency_hz", "tx_power_w", "noise_power_w", "bandwidth_hz", "light_speed",
                   "packet_bytes"},
               "radio");
    read(r, "frequency_hz", c.radio.frequency_hz, "radio");
    read(r, "tx_power_w", c.radio.tx_power_w, "radio");
    read(r, "noise_power_w", c.radio.noise_power_w, "radio");
    read(r, "bandwidth_hz", c.radio.bandwidth_hz, "radio");
    read(r, "light_speed", c.radio.light_speed, "radio");
    read(r, "packet_bytes", c.radio.packet_bytes, "radio");
  }
  if (const auto l = root["learner"]) {
    check_keys(l, {"alpha", "gamma", "lambda", "epsilon", "q_init", "trace_prune"}, "learner");
    read(l, "alpha", c.learner.alpha, "learner");
    read(l, "gamma", c.learner.gamma, "learner");
    read(l, "lambda", c.learner.lambda, "learner");
    read(l, "epsilon", c.learner.epsilon, "learner");
    read(l, "q_init", c.learner.q_init, "learner");
    read(l, "trace_prune", c.learner.trace_prune, "learner");
  }
  if (const auto s = root["scenario"]) {
    check_keys(s, {"queue_range", "frozen_queue", "reward_mode", "queue_attribution", "endpoints",
                   "min_hops", "max_steps", "max_hop_delay", "reward_scale", "protect_endpoints",
                   "require_recoverable", "eval_queue"},
               "scenario");
    auto& o = c.scenario;
    read_pair(s, "queue_range", o.queue_min, o.queue_max, "scenario");
    if (const auto fq = s["frozen_queue"]) {
      if (fq.IsNull()) {
        o.frozen_queue.reset();
      } else {
        o.frozen_queue = convert<int>(fq, "scenario.frozen_queue");
      }
    }
    read_enum(s, "reward_mode", o.reward_mode, "scenario", parse_reward_mode);
    read_enum(s, "queue_attribution", o.queue_attribution, "scenario", parse_queue_attribution);
    read_enum(s, "endpoints", o.endpoints, "scenario", parse_endpoint_policy);
    read(s, "min_hops", o.min_hops, "scenario");
    read(s, "max_steps", o.max_steps, "scenario");
    read(s, "max_hop_delay", o.max_hop_delay, "scenario");
    read(s, "reward_scale", o.reward_scale, "scenario");
    read(s, "protect_endpoints", o.protect_endpoints, "scenario");
    read(s, "require_recoverable", o.require_recoverable, "scenario");
    read(s, "eval_queue", o.eval_queue, "scenario");
  }
  if (const auto a = root["attacks"]) {
    if (!a.IsSequence()) throw ConfigError(fmt::format("'attacks' ({}) must be a list", where(a)));
    c.attacks.clear();
    for (const auto& item : a) {
      check_keys(item, {"episode", "model", "count"}, "attacks[]");
      AttackEvent e;
      if (!item["episode"]) {
        throw ConfigError(fmt::format("attack entry ({}) needs an 'episode'", where(item)));
      }
      read(item, "episode", e.episode, "attacks[]");
      read_enum(item, "model", e.model, "attacks[]", parse_attack_model);
      read(item, "count", e.count, "attacks[]");
      c.attacks.push_back(e);
    }
  } else if (root["episodes"]) {
    c.attacks = {{c.episodes / 2, AttackModel::deliberate, 1}};
  }
  if (const auto a = root["agents"]) {
    if (!a.IsSequence()) throw ConfigError(fmt::format("'agents' ({}) must be a list", where(a)));
    c.agents.clear();
    for (const auto& item : a) {
      check_keys(item, {"name", "kind", "lambda"}, "agents[]");
      AgentVariant v;
      read_enum(item, "kind", v.kind, "agents[]", parse_agent_kind);
      v.name = std::string(to_string(v.kind));
      read(item, "name", v.name, "agents[]");
      if (const auto lam = item["lambda"]) v.lambda = convert<double>(lam, "agents[].lambda");
      c.agents.push_back(v);
    }
  }
  if (const auto m = root["metrics"]) {
    check_keys(m, {"smoothing_window", "threshold", "tail_fraction"}, "metrics");
    read(m, "smoothing_window", c.metrics.smoothing_window, "metrics");
    read(m, "threshold", c.metrics.threshold, "metrics");
    read(m, "tail_fraction", c.metrics.tail_fraction, "metrics");
  }
  if (const auto w = root["sweep"]) {
    check_keys(w, {"enabled", "node_counts", "seeds", "episodes", "attack_episode", "endpoints"},
               "sweep");
    read(w, "enabled", c.sweep.enabled, "sweep");
    read(w, "node_counts", c.sweep.node_counts, "sweep");
    if (const auto seeds = w["seeds"]) c.sweep.seeds = read_seeds(seeds, "sweep.seeds");
    read(w, "episodes", c.sweep.episodes, "sweep");
    read(w, "attack_episode", c.sweep.attack_episode, "sweep");
    read_enum(w, "endpoints", c.sweep.endpoints, "sweep", parse_endpoint_policy);
  }
  c.validate();
  return c;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open config '{}'", path));
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string dump_config(const ExperimentConfig& c) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "episodes" << YAML::Value << c.episodes;
  out << YAML::Key << "seeds" << YAML::Value << YAML::Flow << c.seeds;
  out << YAML::Key << "output_dir" << YAML::Value << c.output_dir;

  out << YAML::Key << "topology" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "nodes" << YAML::Value << c.topology.nodes;
  out << YAML::Key << "area" << YAML::Value << YAML::Flow << std::vector<double>{c.topology.area_x, c.topology.area_y};
  out << YAML::Key << "heights" << YAML::Value << YAML::Flow << std::vector<double>{c.topology.z_min, c.topology.z_max};
  out << YAML::Key << "o_min" << YAML::Value << c.topology.o_min;
  out << YAML::Key << "o_max" << YAML::Value << c.topology.o_max;
  out << YAML::Key << "max_retries" << YAML::Value << c.topology.max_retries;
  out << YAML::EndMap;

  out << YAML::Key << "radio" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "frequency_hz" << YAML::Value << c.radio.frequency_hz;
  out << YAML::Key << "tx_power_w" << YAML::Value << c.radio.tx_power_w;
  out << YAML::Key << "noise_power_w" << YAML::Value << c.radio.noise_power_w;
  out << YAML::Key << "bandwidth_hz" << YAML::Value << c.radio.bandwidth_hz;
  out << YAML::Key << "light_speed" << YAML::Value << c.radio.light_speed;
  out << YAML::Key << "packet_bytes" << YAML::Value << c.radio.packet_bytes;
  out << YAML::EndMap;

  out << YAML::Key << "learner" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "alpha" << YAML::Value << c.learner.alpha;
  out << YAML::Key << "gamma" << YAML::Value << c.learner.gamma;
  out << YAML::Key << "lambda" << YAML::Value << c.learner.lambda;
  out << YAML::Key << "epsilon" << YAML::Value << c.learner.epsilon;
  out << YAML::Key << "q_init" << YAML::Value << c.learner.q_init;
  out << YAML::Key << "trace_prune" << YAML::Value << c.learner.trace_prune;
  out << YAML::EndMap;

  const auto& s = c.scenario;
  out << YAML::Key << "scenario" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "queue_range" << YAML::Value << YAML::Flow << std::vector<int>{s.queue_min, s.queue_max};
  out << YAML::Key << "frozen_queue" << YAML::Value;
  if (s.frozen_queue) {
    out << *s.frozen_queue;
  } else {
    out << YAML::Null;
  }
  out << YAML::Key << "reward_mode" << YAML::Value << std::string(to_string(s.reward_mode));
  out << YAML::Key << "queue_attribution" << YAML::Value << std::string(to_string(s.queue_attribution));
  out << YAML::Key << "endpoints" << YAML::Value << std::string(to_string(s.endpoints));
  out << YAML::Key << "min_hops" << YAML::Value << s.min_hops;
  out << YAML::Key << "max_steps" << YAML::Value << s.max_steps;
  out << YAML::Key << "max_hop_delay" << YAML::Value << s.max_hop_delay;
  out << YAML::Key << "reward_scale" << YAML::Value << s.reward_scale;
  out << YAML::Key << "protect_endpoints" << YAML::Value << s.protect_endpoints;
  out << YAML::Key << "require_recoverable" << YAML::Value << s.require_recoverable;
  out << YAML::Key << "eval_queue" << YAML::Value << s.eval_queue;
  out << YAML::EndMap;

  out << YAML::Key << "attacks" << YAML::Value << YAML::BeginSeq;
  for (const auto& a : c.attacks) {
    out << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "episode" << YAML::Value << a.episode;
    out << YAML::Key << "model" << YAML::Value << std::string(to_string(a.model));
    out << YAML::Key << "count" << YAML::Value << a.count;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "agents" << YAML::Value << YAML::BeginSeq;
  for (const auto& v : c.agents) {
    out << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << v.name;
    out << YAML::Key << "kind" << YAML::Value << std::string(to_string(v.kind));
    if (v.lambda) out << YAML::Key << "lambda" << YAML::Value << *v.lambda;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "metrics" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "smoothing_window" << YAML::Value << c.metrics.smoothing_window;
  out << YAML::Key << "threshold" << YAML::Value << c.metrics.threshold;
  out << YAML::Key << "tail_fraction" << YAML::Value << c.metrics.tail_fraction;
  out << YAML::EndMap;

  out << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "enabled" << YAML::Value << c.sweep.enabled;
  out << YAML::Key << "node_counts" << YAML::Value << YAML::Flow << c.sweep.node_counts;
  out << YAML::Key << "seeds" << YAML::Value << YAML::Flow << c.sweep.seeds;
  out << YAML::Key << "episodes" << YAML::Value << c.sweep.episodes;
  out << YAML::Key << "attack_episode" << YAML::Value << c.sweep.attack_episode;
  out << YAML::Key << "endpoints" << YAML::Value << std::string(to_string(c.sweep.endpoints));
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace uavroute
