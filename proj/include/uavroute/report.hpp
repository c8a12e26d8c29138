#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "uavroute/config.hpp"
#include "uavroute/experiment.hpp"
#include "uavroute/nirm.hpp"

namespace uavroute {

// All tables are comma-separated with a header row and a fixed column
// order. Reals are printed with 17 significant digits.

void write_node_table(const ImportanceReport& report, std::ostream& out);
void write_edge_table(const ImportanceReport& report, std::ostream& out);
void write_episode_table(std::span<const TrainingRun> runs, std::ostream& out);
void write_curve_table(std::span<const CurveRow> rows, std::ostream& out);
void write_delay_table(std::span<const DelayRow> rows, std::ostream& out);
void write_hop_table(std::span<const HopRow> rows, std::ostream& out);
void write_comparison_table(std::span<const ConvergenceStats> stats, std::ostream& out);
void write_sweep_table(std::span<const SweepSample> samples, std::ostream& out);
void write_evaluation_table(const EvaluationRecord& record, std::ostream& out);

// FNV-1a over the canonical config rendering.
std::uint64_t config_hash(const ExperimentConfig& config);

// JSON manifest: version, config hash, seeds, the canonical config and the
// files written next to it.
std::string run_manifest(const ExperimentConfig& config, std::span<const std::string> files);

// Writes the fig2/fig3/fig4 tables, the comparison, the episode log and the
// manifest into `dir` (created if missing). Returns the file names written.
std::vector<std::string> write_experiment_outputs(const ExperimentResults& results,
                                                  const ExperimentConfig& config,
                                                  const std::string& dir);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace uavroute
