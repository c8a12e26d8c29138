#include "uavroute/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <queue>
#include <thread>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "uavroute/error.hpp"
#include "uavroute/rng.hpp"

namespace uavroute {

std::uint64_t attack_seed(std::uint64_t run_seed, int episode) {
  return derive_seed(derive_seed(run_seed, stream::attack), static_cast<std::uint64_t>(episode));
}

namespace {

std::vector<int> protected_endpoints(const ExperimentConfig& config, int source, int destination) {
  if (!config.scenario.protect_endpoints) return {};
  return {source, destination};
}

int nearest_to(const UavNetwork& net, double x, double y) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& node : net.nodes()) {
    const double d = std::hypot(node.position.x - x, node.position.y - y);
    if (d < best_d) {
      best_d = d;
      best = node.id;
    }
  }
  return best;
}

// Replays the attack schedule on the initial network exactly as training
// will; true when the endpoints stay connected throughout.
bool survives_schedule(const ExperimentConfig& config, const Scenario& scenario,
                       std::span<const AttackEvent> schedule) {
  UavNetwork net = scenario.network;
  const auto keep = protected_endpoints(config, scenario.source, scenario.destination);
  for (const auto& event : schedule) {
    const auto report = node_importance(net);
    std::vector<int> targets;
    try {
      targets = select_targets(report, event.count, event.model, keep,
                               attack_seed(scenario.seed, event.episode));
      net = apply_attack(net, targets, keep);
    } catch (const ContractError&) {
      return false;
    }
    if (!reachable(net.adjacency(), scenario.source, scenario.destination)) return false;
  }
  return true;
}

}  // namespace

Scenario make_scenario(const ExperimentConfig& config, int nodes, EndpointPolicy policy,
                       std::uint64_t seed, std::span<const AttackEvent> schedule) {
  TopologyParams params = config.topology;
  params.nodes = nodes;
  params.validate();
  const int min_hops = config.scenario.min_hops;
  const std::uint64_t topo_base = derive_seed(seed, stream::topology);
  Rng endpoint_rng(derive_seed(seed, stream::endpoints));

  for (int attempt = 0; attempt < params.max_retries; ++attempt) {
    Scenario sc;
    sc.seed = seed;
    sc.network = generate_random_topology(params, derive_seed(topo_base, static_cast<std::uint64_t>(attempt)));
    const auto& adj = sc.network.adjacency();
    if (policy == EndpointPolicy::corners) {
      sc.source = nearest_to(sc.network, 0.0, 0.0);
      sc.destination = nearest_to(sc.network, params.area_x, params.area_y);
      if (sc.source == sc.destination) continue;
      if (bfs_hops(adj, sc.source)[static_cast<std::size_t>(sc.destination)] < min_hops) continue;
    } else {
      std::vector<std::pair<int, int>> pairs;
      for (int i = 0; i < nodes; ++i) {
        const auto hops = bfs_hops(adj, i);
        for (int j = 0; j < nodes; ++j) {
          if (j != i && hops[static_cast<std::size_t>(j)] >= min_hops) pairs.emplace_back(i, j);
        }
      }
      if (pairs.empty()) continue;
      const auto pick = uniform_int(endpoint_rng, 0, static_cast<long long>(pairs.size()) - 1);
      std::tie(sc.source, sc.destination) = pairs[static_cast<std::size_t>(pick)];
    }
    if (config.scenario.require_recoverable && !survives_schedule(config, sc, schedule)) continue;
    return sc;
  }
  throw ScenarioError(fmt::format(
      "no {}-node placement with endpoints {} or more hops apart{} after {} attempts (seed {})",
      nodes, min_hops, config.scenario.require_recoverable ? " that survives the attack schedule" : "",
      params.max_retries, seed));
}

Scenario make_scenario(const ExperimentConfig& config, std::uint64_t seed) {
  return make_scenario(config, config.topology.nodes, config.scenario.endpoints, seed, config.attacks);
}

ScenarioSpec scenario_spec(const ExperimentConfig& config, const Scenario& scenario) {
  const auto& o = config.scenario;
  ScenarioSpec spec;
  spec.network = scenario.network;
  spec.source = scenario.source;
  spec.destination = scenario.destination;
  spec.radio = config.radio;
  spec.queue_min = o.queue_min;
  spec.queue_max = o.queue_max;
  spec.frozen_queue = o.frozen_queue;
  spec.max_steps = o.max_steps;
  spec.reward_scale = o.reward_scale;
  spec.reward_mode = o.reward_mode;
  spec.queue_attribution = o.queue_attribution;
  spec.max_hop_delay = o.max_hop_delay;
  return spec;
}

TrainingRun run_training(const ExperimentConfig& config, const Scenario& scenario,
                         const AgentVariant& variant, std::uint64_t seed, int episodes,
                         std::span<const AttackEvent> schedule) {
  const LearnerConfig learner = config.learner_for(variant);
  learner.validate();
  RoutingEnvironment env(scenario_spec(config, scenario));
  const int n = scenario.network.size();

  TrainingRun run;
  run.agent = variant.name;
  run.seed = seed;
  run.scenario = scenario;
  run.q = QTable(n, learner.q_init);
  run.logs.reserve(static_cast<std::size_t>(episodes));
  TraceTable traces(n);
  Rng rng(derive_seed(seed, stream::learner));
  const auto keep = protected_endpoints(config, scenario.source, scenario.destination);

  std::size_t next_attack = 0;
  for (int episode = 0; episode < episodes; ++episode) {
    while (next_attack < schedule.size() && schedule[next_attack].episode == episode) {
      const auto& event = schedule[next_attack++];
      AttackRecord record;
      record.episode = episode;
      record.model = event.model;
      record.report = node_importance(env.network());
      record.targets = select_targets(record.report, event.count, event.model, keep,
                                      attack_seed(scenario.seed, episode));
      record.q_before = run.q;
      record.network_before = env.network();
      UavNetwork attacked = apply_attack(env.network(), record.targets, keep);
      if (!reachable(attacked.adjacency(), scenario.source, scenario.destination)) {
        throw ScenarioError(fmt::format(
            "attack at episode {} on nodes [{}] leaves destination {} unreachable from source {}",
            episode, fmt::join(record.targets, ","), scenario.destination, scenario.source));
      }
      env.set_network(std::move(attacked));
      run.attacks.push_back(std::move(record));
    }
    EpisodeLog log = run_episode(variant.kind, env, run.q, traces, learner, rng);
    log.episode = episode;
    log.agent = variant.name;
    log.seed = seed;
    run.logs.push_back(std::move(log));
  }
  run.final_network = env.network();
  return run;
}

TrainingRun run_training(const ExperimentConfig& config, const AgentVariant& variant,
                         std::uint64_t seed) {
  return run_training(config, make_scenario(config, seed), variant, seed, config.episodes,
                      config.attacks);
}

double mode_path_cost(const UavNetwork& network, const RadioParams& radio, std::span<const int> path,
                      std::span<const int> queues, RewardMode mode, QueueAttribution attribution) {
  if (path.size() < 2) throw ContractError("a path needs at least two nodes");
  const std::size_t hops = path.size() - 1;
  const std::size_t charged = mode == RewardMode::literal ? hops - 1 : hops;
  double total = 0.0;
  for (std::size_t k = 0; k < charged; ++k) {
    const int q = hop_queue(queues, path[k], path[k + 1], attribution);
    total += link_metrics(network, radio, path[k], path[k + 1], q).hop_delay;
  }
  return total;
}

OraclePath shortest_delay_oracle(const UavNetwork& network, const RadioParams& radio,
                                 std::span<const int> queues, int source, int destination,
                                 RewardMode mode, QueueAttribution attribution) {
  const int n = network.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(static_cast<std::size_t>(n), inf);
  std::vector<int> parent(static_cast<std::size_t>(n), -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> frontier;
  dist[static_cast<std::size_t>(source)] = 0.0;
  frontier.emplace(0.0, source);
  while (!frontier.empty()) {
    const auto [d, u] = frontier.top();
    frontier.pop();
    if (d > dist[static_cast<std::size_t>(u)]) continue;
    if (u == destination) break;
    for (int v : network.neighbors(u)) {
      if (network.node(v).attacked) continue;
      double w = 0.0;
      if (!(mode == RewardMode::literal && v == destination)) {
        w = link_metrics(network, radio, u, v, hop_queue(queues, u, v, attribution)).hop_delay;
      }
      if (d + w < dist[static_cast<std::size_t>(v)]) {
        dist[static_cast<std::size_t>(v)] = d + w;
        parent[static_cast<std::size_t>(v)] = u;
        frontier.emplace(d + w, v);
      }
    }
  }
  if (!std::isfinite(dist[static_cast<std::size_t>(destination)])) {
    throw ScenarioError(fmt::format("destination {} unreachable from {}", destination, source));
  }
  OraclePath out;
  out.cost = dist[static_cast<std::size_t>(destination)];
  for (int v = destination; v != -1; v = parent[static_cast<std::size_t>(v)]) out.path.push_back(v);
  std::reverse(out.path.begin(), out.path.end());
  return out;
}

EvaluationRecord evaluate(const QTable& q, const ScenarioSpec& spec, std::span<const int> queues) {
  const auto& net = spec.network;
  EvaluationRecord rec;
  const auto greedy = greedy_policy_path(q, net, spec.source, spec.destination, spec.step_cap());
  rec.status = greedy.status;
  rec.path = greedy.path;
  rec.hops = static_cast<int>(rec.path.size()) - 1;

  const auto oracle = shortest_delay_oracle(net, spec.radio, queues, spec.source, spec.destination,
                                            spec.reward_mode, spec.queue_attribution);
  rec.oracle_path = oracle.path;
  rec.oracle_cost = oracle.cost;
  if (!rec.converged()) return rec;

  rec.endpoints_ok = rec.path.front() == spec.source && rec.path.back() == spec.destination;
  rec.avoids_attacked = std::none_of(rec.path.begin(), rec.path.end(),
                                     [&](int id) { return net.node(id).attacked; });
  rec.distances_ok = true;
  for (std::size_t k = 0; k + 1 < rec.path.size(); ++k) {
    const int from = rec.path[k];
    const int to = rec.path[k + 1];
    const double d = net.distance(from, to);
    if (d < net.o_min() || d > net.o_max()) rec.distances_ok = false;
    const double t =
        link_metrics(net, spec.radio, from, to, hop_queue(queues, from, to, spec.queue_attribution))
            .hop_delay;
    if (t > spec.max_hop_delay) ++rec.delay_violations;
  }
  rec.path_delay = path_delay(net, spec.radio, rec.path, queues, spec.queue_attribution);
  rec.path_distance = path_distance(net, rec.path);
  rec.mode_cost = mode_path_cost(net, spec.radio, rec.path, queues, spec.reward_mode, spec.queue_attribution);
  rec.regret = rec.mode_cost - rec.oracle_cost;
  return rec;
}

EvaluationRecord evaluate(const QTable& q, const ScenarioSpec& spec, int frozen_queue) {
  const std::vector<int> queues(static_cast<std::size_t>(spec.network.size()), frozen_queue);
  return evaluate(q, spec, queues);
}

std::vector<double> moving_average(std::span<const double> series, int window) {
  if (window < 1) throw ContractError("smoothing window must be at least 1");
  const auto w = static_cast<std::size_t>(window);
  std::vector<double> out(series.size());
  for (std::size_t t = 0; t < series.size(); ++t) {
    const std::size_t first = t + 1 > w ? t + 1 - w : 0;
    // Deviations from the window's first value: a constant window averages
    // to exactly that constant.
    const double base = series[first];
    double dev = 0.0;
    for (std::size_t k = first; k <= t; ++k) dev += series[k] - base;
    out[t] = base + dev / static_cast<double>(t + 1 - first);
  }
  return out;
}

int episodes_to_threshold(std::span<const double> rewards, int window, double tolerance) {
  if (rewards.empty()) throw ContractError("empty reward series");
  const auto smoothed = moving_average(rewards, window);
  const double target = smoothed.back();
  for (std::size_t t = 0; t < smoothed.size(); ++t) {
    if (std::abs(smoothed[t] - target) <= tolerance * std::abs(target)) return static_cast<int>(t);
  }
  return static_cast<int>(smoothed.size()) - 1;
}

double tail_variance(std::span<const double> series, double fraction) {
  if (series.empty()) return 0.0;
  const auto count = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(series.size()))));
  const auto tail = series.subspan(series.size() - std::min(count, series.size()));
  const double mean = std::accumulate(tail.begin(), tail.end(), 0.0) / static_cast<double>(tail.size());
  double acc = 0.0;
  for (double x : tail) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(tail.size());
}

std::vector<CurveRow> reward_step_curves(std::span<const TrainingRun> runs, int window) {
  std::vector<std::string> agents;
  for (const auto& r : runs) {
    if (std::find(agents.begin(), agents.end(), r.agent) == agents.end()) agents.push_back(r.agent);
  }
  std::vector<CurveRow> rows;
  for (const auto& agent : agents) {
    std::size_t length = std::numeric_limits<std::size_t>::max();
    int count = 0;
    for (const auto& r : runs) {
      if (r.agent != agent) continue;
      length = std::min(length, r.logs.size());
      ++count;
    }
    std::vector<double> reward(length, 0.0);
    std::vector<double> steps(length, 0.0);
    for (const auto& r : runs) {
      if (r.agent != agent) continue;
      for (std::size_t e = 0; e < length; ++e) {
        reward[e] += r.logs[e].total_reward;
        steps[e] += r.logs[e].steps;
      }
    }
    for (std::size_t e = 0; e < length; ++e) {
      reward[e] /= count;
      steps[e] /= count;
    }
    const auto sr = moving_average(reward, window);
    const auto ss = moving_average(steps, window);
    for (std::size_t e = 0; e < length; ++e) {
      rows.push_back({agent, static_cast<int>(e), reward[e], steps[e], sr[e], ss[e]});
    }
  }
  return rows;
}

std::vector<DelayRow> delay_by_node_count(std::span<const SweepSample> samples) {
  std::vector<DelayRow> rows;
  for (const auto& s : samples) {
    auto it = std::find_if(rows.begin(), rows.end(),
                           [&](const DelayRow& r) { return r.agent == s.agent && r.nodes == s.nodes; });
    if (it == rows.end()) {
      rows.push_back({s.agent, s.nodes, 0.0, 0.0, 0});
      it = rows.end() - 1;
    }
    if (!s.original.converged() || !s.recovered.converged()) continue;
    it->original_delay += s.original.path_delay;
    it->recovery_delay += s.recovered.path_delay;
    ++it->samples;
  }
  for (auto& r : rows) {
    if (r.samples == 0) continue;
    r.original_delay /= r.samples;
    r.recovery_delay /= r.samples;
  }
  return rows;
}

std::vector<HopRow> steps_distance_by_hops(std::span<const SweepSample> samples) {
  std::vector<HopRow> rows;
  for (const auto& s : samples) {
    if (!s.recovered.converged()) continue;
    auto it = std::find_if(rows.begin(), rows.end(), [&](const HopRow& r) {
      return r.agent == s.agent && r.hops == s.recovered.hops;
    });
    if (it == rows.end()) {
      rows.push_back({s.agent, s.recovered.hops, 0.0, 0.0, 0});
      it = rows.end() - 1;
    }
    it->mean_steps += s.mean_training_steps;
    it->mean_distance += s.recovered.path_distance;
    ++it->samples;
  }
  for (auto& r : rows) {
    r.mean_steps /= r.samples;
    r.mean_distance /= r.samples;
  }
  std::vector<std::string> order;
  for (const auto& r : rows) {
    if (std::find(order.begin(), order.end(), r.agent) == order.end()) order.push_back(r.agent);
  }
  const auto rank = [&](const std::string& agent) {
    return std::find(order.begin(), order.end(), agent) - order.begin();
  };
  std::stable_sort(rows.begin(), rows.end(), [&](const HopRow& a, const HopRow& b) {
    return std::pair(rank(a.agent), a.hops) < std::pair(rank(b.agent), b.hops);
  });
  return rows;
}

ConvergenceStats convergence_stats(const TrainingRun& run, const MetricsOptions& metrics) {
  std::vector<double> rewards;
  std::vector<double> steps;
  for (const auto& log : run.logs) {
    rewards.push_back(log.total_reward);
    steps.push_back(log.steps);
  }
  ConvergenceStats s;
  s.agent = run.agent;
  s.seed = run.seed;
  s.episodes_to_threshold = episodes_to_threshold(rewards, metrics.smoothing_window, metrics.threshold);
  s.final_smoothed_reward = moving_average(rewards, metrics.smoothing_window).back();
  s.step_variance = tail_variance(steps, metrics.tail_fraction);
  return s;
}

void parallel_for(int count, int jobs, const std::function<void(int)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  for (int w = 0; w < std::min(jobs, count); ++w) {
    workers.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
}

ComparisonReport compare_agents(const ExperimentConfig& config, int jobs) {
  if (config.agents.size() < 2) throw ConfigError("comparison needs at least two agent variants");
  std::vector<Scenario> scenarios(config.seeds.size());
  parallel_for(static_cast<int>(scenarios.size()), jobs, [&](int i) {
    scenarios[static_cast<std::size_t>(i)] = make_scenario(config, config.seeds[static_cast<std::size_t>(i)]);
  });
  const int seeds = static_cast<int>(config.seeds.size());
  ComparisonReport report;
  report.runs.resize(config.agents.size() * config.seeds.size());
  parallel_for(static_cast<int>(report.runs.size()), jobs, [&](int i) {
    const auto& variant = config.agents[static_cast<std::size_t>(i / seeds)];
    const auto k = static_cast<std::size_t>(i % seeds);
    report.runs[static_cast<std::size_t>(i)] =
        run_training(config, scenarios[k], variant, config.seeds[k], config.episodes, config.attacks);
  });
  for (const auto& run : report.runs) report.stats.push_back(convergence_stats(run, config.metrics));
  return report;
}

std::vector<SweepSample> run_sweep(const ExperimentConfig& config, int jobs) {
  const auto& sw = config.sweep;
  const int attack_at = sw.attack_episode >= 0 ? sw.attack_episode : sw.episodes / 2;
  const std::vector<AttackEvent> schedule{{attack_at, AttackModel::deliberate, 1}};

  struct Cell {
    int nodes;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (int n : sw.node_counts) {
    for (auto s : sw.seeds) cells.push_back({n, s});
  }
  std::vector<Scenario> scenarios(cells.size());
  parallel_for(static_cast<int>(cells.size()), jobs, [&](int i) {
    const auto& c = cells[static_cast<std::size_t>(i)];
    scenarios[static_cast<std::size_t>(i)] = make_scenario(
        config, c.nodes, sw.endpoints, derive_seed(c.seed, 1000 + static_cast<std::uint64_t>(c.nodes)),
        schedule);
  });

  const int agents = static_cast<int>(config.agents.size());
  std::vector<SweepSample> samples(cells.size() * config.agents.size());
  parallel_for(static_cast<int>(samples.size()), jobs, [&](int i) {
    const auto cell = static_cast<std::size_t>(i / agents);
    const auto& variant = config.agents[static_cast<std::size_t>(i % agents)];
    const auto& scenario = scenarios[cell];
    const auto run = run_training(config, scenario, variant, cells[cell].seed, sw.episodes, schedule);

    auto& out = samples[static_cast<std::size_t>(i)];
    out.agent = variant.name;
    out.nodes = cells[cell].nodes;
    out.seed = cells[cell].seed;
    ScenarioSpec spec = scenario_spec(config, scenario);
    spec.network = run.attacks.front().network_before;
    out.original = evaluate(run.attacks.front().q_before, spec, config.scenario.eval_queue);
    spec.network = run.final_network;
    out.recovered = evaluate(run.q, spec, config.scenario.eval_queue);
    double steps = 0.0;
    for (const auto& log : run.logs) steps += log.steps;
    out.mean_training_steps = steps / static_cast<double>(run.logs.size());
  });
  return samples;
}

ExperimentResults run_experiment(const ExperimentConfig& config, int jobs) {
  config.validate();
  ExperimentResults results;
  if (config.agents.size() >= 2) {
    results.comparison = compare_agents(config, jobs);
  } else {
    for (auto seed : config.seeds) {
      auto& run = results.comparison.runs.emplace_back(run_training(
          config, make_scenario(config, seed), config.agents.front(), seed, config.episodes, config.attacks));
      results.comparison.stats.push_back(convergence_stats(run, config.metrics));
    }
  }
  results.curves = reward_step_curves(results.comparison.runs, config.metrics.smoothing_window);
  if (config.sweep.enabled) {
    results.sweep = run_sweep(config, jobs);
    results.delays = delay_by_node_count(results.sweep);
    results.hops = steps_distance_by_hops(results.sweep);
  }
  return results;
}

}  // namespace uavroute
