#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "uavroute/agents.hpp"
#include "uavroute/config.hpp"
#include "uavroute/environment.hpp"
#include "uavroute/nirm.hpp"

namespace uavroute {

// A generated network with its routing endpoints.
struct Scenario {
  UavNetwork network;
  int source = 0;
  int destination = 1;
  std::uint64_t seed = 0;
};

// Seeds for the independent random streams of one run.
namespace stream {
inline constexpr std::uint64_t topology = 1;
inline constexpr std::uint64_t endpoints = 2;
inline constexpr std::uint64_t learner = 3;
inline constexpr std::uint64_t attack = 4;
}  // namespace stream

std::uint64_t attack_seed(std::uint64_t run_seed, int episode);

// Places `nodes` UAVs and picks endpoints under `policy`. Placements whose
// endpoints are closer than scenario.min_hops, or which the attack schedule
// would disconnect (when require_recoverable is set), are redrawn.
Scenario make_scenario(const ExperimentConfig& config, int nodes, EndpointPolicy policy,
                       std::uint64_t seed, std::span<const AttackEvent> schedule = {});
Scenario make_scenario(const ExperimentConfig& config, std::uint64_t seed);

ScenarioSpec scenario_spec(const ExperimentConfig& config, const Scenario& scenario);

struct AttackRecord {
  int episode = 0;
  AttackModel model = AttackModel::deliberate;
  std::vector<int> targets;
  ImportanceReport report;  // ranking the targets were drawn from
  QTable q_before;          // table as it stood when the attack landed
  UavNetwork network_before;
};

struct TrainingRun {
  std::string agent;
  std::uint64_t seed = 0;
  Scenario scenario;
  std::vector<EpisodeLog> logs;
  std::vector<AttackRecord> attacks;
  QTable q;
  UavNetwork final_network;
};

// Trains one agent for `episodes` episodes. Scheduled attacks are applied
// before their episode: the importance ranking is recomputed on the
// current network, targets are selected and removed, and training goes on
// with the same Q-table. Throws ScenarioError with a diagnostic when an
// attack leaves the destination unreachable.
TrainingRun run_training(const ExperimentConfig& config, const Scenario& scenario,
                         const AgentVariant& variant, std::uint64_t seed, int episodes,
                         std::span<const AttackEvent> schedule);
TrainingRun run_training(const ExperimentConfig& config, const AgentVariant& variant,
                         std::uint64_t seed);

struct OraclePath {
  std::vector<int> path;
  double cost = 0.0;
};

// Cost of `path` as the reward mode sees it: the plain end-to-end delay in
// full_delay mode, the delay without the final hop in literal mode.
double mode_path_cost(const UavNetwork& network, const RadioParams& radio, std::span<const int> path,
                      std::span<const int> queues, RewardMode mode, QueueAttribution attribution);

// Exact minimum of mode_path_cost over all source-destination paths.
// Throws ScenarioError when the destination is unreachable.
OraclePath shortest_delay_oracle(const UavNetwork& network, const RadioParams& radio,
                                 std::span<const int> queues, int source, int destination,
                                 RewardMode mode,
                                 QueueAttribution attribution = QueueAttribution::receiver);

struct EvaluationRecord {
  PathStatus status = PathStatus::dead_end;
  std::vector<int> path;
  int hops = 0;
  double path_delay = 0.0;     // end-to-end, all hops
  double path_distance = 0.0;  // meters
  double mode_cost = 0.0;
  int delay_violations = 0;   // hops above (T_p)_max
  bool distances_ok = false;  // every hop within [o_min, o_max]
  bool endpoints_ok = false;
  bool avoids_attacked = false;
  std::vector<int> oracle_path;
  double oracle_cost = 0.0;
  double regret = 0.0;  // mode_cost - oracle_cost

  bool converged() const { return status == PathStatus::reached; }
};

// Greedy path of `q` scored under `queues` (one entry per node).
EvaluationRecord evaluate(const QTable& q, const ScenarioSpec& spec, std::span<const int> queues);
EvaluationRecord evaluate(const QTable& q, const ScenarioSpec& spec, int frozen_queue);

// Trailing moving average; entry t averages the last min(window, t + 1) values.
std::vector<double> moving_average(std::span<const double> series, int window);

// First episode whose smoothed reward is within `tolerance` (relative) of
// the final smoothed reward.
int episodes_to_threshold(std::span<const double> rewards, int window, double tolerance);

// Population variance of the last `fraction` of the series.
double tail_variance(std::span<const double> series, double fraction);

struct CurveRow {
  std::string agent;
  int episode = 0;
  double mean_reward = 0.0;
  double mean_steps = 0.0;
  double smoothed_reward = 0.0;
  double smoothed_steps = 0.0;
};

// Reward and step curves averaged across the runs of each agent.
std::vector<CurveRow> reward_step_curves(std::span<const TrainingRun> runs, int window);

struct SweepSample {
  std::string agent;
  int nodes = 0;
  std::uint64_t seed = 0;
  EvaluationRecord original;
  EvaluationRecord recovered;
  double mean_training_steps = 0.0;
};

struct DelayRow {
  std::string agent;
  int nodes = 0;
  double original_delay = 0.0;
  double recovery_delay = 0.0;
  int samples = 0;  // converged before and after the attack
};

std::vector<DelayRow> delay_by_node_count(std::span<const SweepSample> samples);

struct HopRow {
  std::string agent;
  int hops = 0;
  double mean_steps = 0.0;
  double mean_distance = 0.0;
  int samples = 0;
};

// Binned by the hop count of the final greedy path.
std::vector<HopRow> steps_distance_by_hops(std::span<const SweepSample> samples);

struct ConvergenceStats {
  std::string agent;
  std::uint64_t seed = 0;
  int episodes_to_threshold = 0;
  double final_smoothed_reward = 0.0;
  double step_variance = 0.0;
};

ConvergenceStats convergence_stats(const TrainingRun& run, const MetricsOptions& metrics);

struct ComparisonReport {
  std::vector<TrainingRun> runs;  // agent-major, seed-minor
  std::vector<ConvergenceStats> stats;
};

// Every configured variant on the same seeded scenarios. Needs at least
// two variants.
ComparisonReport compare_agents(const ExperimentConfig& config, int jobs = 1);

// Runs the delay-vs-node-count sweep.
std::vector<SweepSample> run_sweep(const ExperimentConfig& config, int jobs = 1);

struct ExperimentResults {
  ComparisonReport comparison;
  std::vector<CurveRow> curves;
  std::vector<SweepSample> sweep;
  std::vector<DelayRow> delays;
  std::vector<HopRow> hops;
};

ExperimentResults run_experiment(const ExperimentConfig& config, int jobs = 1);

// Calls fn(i) for i in [0, count) on up to `jobs` threads. Results must be
// written to per-index slots; the first exception is rethrown.
void parallel_for(int count, int jobs, const std::function<void(int)>& fn);

}  // namespace uavroute
