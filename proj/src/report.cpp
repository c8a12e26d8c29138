#include "uavroute/report.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "uavroute/error.hpp"

#ifndef UAVROUTE_VERSION
#define UAVROUTE_VERSION "0.0.0"
#endif

namespace uavroute {

namespace {

std::string real(double x) { return fmt::format("{:.17g}", x); }

std::string path_field(std::span<const int> path) { return fmt::format("{}", fmt::join(path, " ")); }

std::string_view termination_name(Termination t) {
  switch (t) {
    case Termination::none: return "none";
    case Termination::reached: return "reached";
    case Termination::dead_end: return "dead_end";
    case Termination::truncated: return "truncated";
  }
  return "?";
}

}  // namespace

void write_node_table(const ImportanceReport& report, std::ostream& out) {
  std::vector<int> rank_of(report.ranking.size());
  for (std::size_t r = 0; r < report.ranking.size(); ++r) {
    rank_of[static_cast<std::size_t>(report.ranking[r])] = static_cast<int>(r) + 1;
  }
  out << "node,degree,importance,rank,attacked\n";
  for (std::size_t i = 0; i < report.scores.size(); ++i) {
    out << fmt::format("{},{},{},{},{}\n", i, report.degrees[i], real(report.scores[i]), rank_of[i],
                       report.attacked[i] ? 1 : 0);
  }
}

void write_edge_table(const ImportanceReport& report, std::ostream& out) {
  out << "i,j,triangles,connectivity,importance\n";
  for (const auto& e : report.edges) {
    out << fmt::format("{},{},{},{},{}\n", e.i, e.j, e.triangles, real(e.connectivity), real(e.importance));
  }
}

void write_episode_table(std::span<const TrainingRun> runs, std::ostream& out) {
  out << "agent,seed,episode,total_reward,steps,termination,path_delay,path_distance,path\n";
  for (const auto& run : runs) {
    for (const auto& log : run.logs) {
      out << fmt::format("{},{},{},{},{},{},{},{},{}\n", log.agent, log.seed, log.episode,
                         real(log.total_reward), log.steps, termination_name(log.termination),
                         real(log.path_delay), real(log.path_distance), path_field(log.path));
    }
  }
}

void write_curve_table(std::span<const CurveRow> rows, std::ostream& out) {
  out << "agent,episode,mean_reward,mean_steps,smoothed_reward,smoothed_steps\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{},{}\n", r.agent, r.episode, real(r.mean_reward),
                       real(r.mean_steps), real(r.smoothed_reward), real(r.smoothed_steps));
  }
}

void write_delay_table(std::span<const DelayRow> rows, std::ostream& out) {
  out << "agent,nodes,original_delay,recovery_delay,samples\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{}\n", r.agent, r.nodes, real(r.original_delay),
                       real(r.recovery_delay), r.samples);
  }
}

void write_hop_table(std::span<const HopRow> rows, std::ostream& out) {
  out << "agent,hops,mean_steps,mean_distance,samples\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{}\n", r.agent, r.hops, real(r.mean_steps), real(r.mean_distance),
                       r.samples);
  }
}

void write_comparison_table(std::span<const ConvergenceStats> stats, std::ostream& out) {
  out << "agent,seed,episodes_to_threshold,final_smoothed_reward,step_variance\n";
  for (const auto& s : stats) {
    out << fmt::format("{},{},{},{},{}\n", s.agent, s.seed, s.episodes_to_threshold,
                       real(s.final_smoothed_reward), real(s.step_variance));
  }
}

void write_sweep_table(std::span<const SweepSample> samples, std::ostream& out) {
  out << "agent,nodes,seed,original_status,original_delay,original_regret,recovered_status,"
         "recovered_delay,recovered_regret,recovered_hops,mean_training_steps\n";
  for (const auto& s : samples) {
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", s.agent, s.nodes, s.seed,
                       to_string(s.original.status), real(s.original.path_delay),
                       real(s.original.regret), to_string(s.recovered.status),
                       real(s.recovered.path_delay), real(s.recovered.regret), s.recovered.hops,
                       real(s.mean_training_steps));
  }
}

void write_evaluation_table(const EvaluationRecord& r, std::ostream& out) {
  out << "status,path,hops,path_delay,path_distance,mode_cost,oracle_path,oracle_cost,regret,"
         "delay_violations,distances_ok,endpoints_ok,avoids_attacked\n";
  out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", to_string(r.status),
                     path_field(r.path), r.hops, real(r.path_delay), real(r.path_distance),
                     real(r.mode_cost), path_field(r.oracle_path), real(r.oracle_cost),
                     real(r.regret), r.delay_violations, r.distances_ok ? 1 : 0,
                     r.endpoints_ok ? 1 : 0, r.avoids_attacked ? 1 : 0);
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : dump_config(config)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string run_manifest(const ExperimentConfig& config, std::span<const std::string> files) {
  nlohmann::ordered_json m;
  m["tool"] = "uavroute";
  m["version"] = UAVROUTE_VERSION;
  m["config_hash"] = fmt::format("{:016x}", config_hash(config));
  m["seeds"] = config.seeds;
  m["sweep_seeds"] = config.sweep.enabled ? config.sweep.seeds : std::vector<std::uint64_t>{};
  m["files"] = std::vector<std::string>(files.begin(), files.end());
  m["config"] = dump_config(config);
  return m.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path));
  out << content;
  if (!out) throw IoError(fmt::format("failed writing '{}'", path));
}

std::vector<std::string> write_experiment_outputs(const ExperimentResults& results,
                                                  const ExperimentConfig& config,
                                                  const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create '{}': {}", dir, ec.message()));

  std::vector<std::string> files;
  const auto emit = [&](const std::string& name, auto&& writer) {
    std::ostringstream text;
    writer(text);
    write_text_file((std::filesystem::path(dir) / name).string(), text.str());
    files.push_back(name);
  };
  emit("fig2_reward_steps.csv", [&](std::ostream& o) { write_curve_table(results.curves, o); });
  emit("comparison.csv", [&](std::ostream& o) { write_comparison_table(results.comparison.stats, o); });
  emit("episodes.csv", [&](std::ostream& o) { write_episode_table(results.comparison.runs, o); });
  if (config.sweep.enabled) {
    emit("fig3_delay_nodes.csv", [&](std::ostream& o) { write_delay_table(results.delays, o); });
    emit("fig4_steps_distance_hops.csv", [&](std::ostream& o) { write_hop_table(results.hops, o); });
    emit("sweep.csv", [&](std::ostream& o) { write_sweep_table(results.sweep, o); });
  }
  write_text_file((std::filesystem::path(dir) / "manifest.json").string(), run_manifest(config, files));
  files.push_back("manifest.json");
  return files;
}

}  // namespace uavroute
