#include "uavroute/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "uavroute/agents.hpp"
#include "uavroute/config.hpp"
#include "uavroute/error.hpp"
#include "uavroute/experiment.hpp"
#include "uavroute/nirm.hpp"
#include "uavroute/report.hpp"
#include "uavroute/topology.hpp"

namespace uavroute::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  int jobs = 1;
  bool dry_run = false;
  int verbosity = 0;

  // generate
  int nodes = 20;
  std::vector<double> area{1000.0, 1000.0};
  std::vector<double> heights{130.0, 140.0};
  std::vector<double> bounds{30.0, 500.0};
  // rank / attack
  std::string topology_path;
  int count = 1;
  std::string model = "deliberate";
  std::vector<int> protect;
  // evaluate
  std::string qtable_path;
  std::string agent;
  bool pre_attack = false;
};

std::string output_dir(const Options& o, const std::string& fallback) {
  if (!o.out.empty()) return o.out;
  if (const char* env = std::getenv(kOutEnv); env != nullptr && *env != '\0') return env;
  return fallback;
}

ExperimentConfig load_config(const Options& o) {
  ExperimentConfig c = o.config_path.empty() ? parse_config("") : load_config_file(o.config_path);
  if (o.seed) c.seeds = {*o.seed};
  return c;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create '{}': {}", dir, ec.message()));
}

void ensure_parent(const std::string& file) {
  const auto parent = fs::path(file).parent_path();
  if (!parent.empty()) ensure_dir(parent.string());
}

template <typename Writer>
void emit(const std::string& dir, const std::string& name, Writer&& writer) {
  std::ostringstream text;
  writer(text);
  write_text_file((fs::path(dir) / name).string(), text.str());
}

int cmd_generate(const Options& o, std::ostream& out) {
  TopologyParams p;
  p.nodes = o.nodes;
  p.area_x = o.area[0];
  p.area_y = o.area[1];
  p.z_min = o.heights[0];
  p.z_max = o.heights[1];
  p.o_min = o.bounds[0];
  p.o_max = o.bounds[1];
  const auto net = generate_random_topology(p, o.seed.value_or(1));
  if (o.out.empty()) {
    save_topology(net, out);
  } else {
    ensure_parent(o.out);
    save_topology_file(net, o.out);
  }
  return kOk;
}

int cmd_rank(const Options& o, std::ostream& out) {
  const auto report = node_importance(load_topology_file(o.topology_path));
  if (o.out.empty()) {
    write_node_table(report, out);
    out << '\n';
    write_edge_table(report, out);
    return kOk;
  }
  ensure_dir(o.out);
  emit(o.out, "nodes.csv", [&](std::ostream& s) { write_node_table(report, s); });
  emit(o.out, "edges.csv", [&](std::ostream& s) { write_edge_table(report, s); });
  return kOk;
}

int cmd_attack(const Options& o, std::ostream& out, std::ostream& err) {
  const auto net = load_topology_file(o.topology_path);
  const auto report = node_importance(net);
  const auto targets =
      select_targets(report, o.count, parse_attack_model(o.model), o.protect, o.seed.value_or(1));
  const auto attacked = apply_attack(net, targets, o.protect);
  err << fmt::format("attacked: {}\n", fmt::join(targets, ","));
  if (o.out.empty()) {
    save_topology(attacked, out);
  } else {
    ensure_parent(o.out);
    save_topology_file(attacked, o.out);
  }
  return kOk;
}

std::vector<AgentVariant> selected_agents(const ExperimentConfig& c, const std::string& name) {
  if (name.empty()) return c.agents;
  for (const auto& v : c.agents) {
    if (v.name == name) return {v};
  }
  throw ConfigError(fmt::format("no agent named '{}' in the config", name));
}

void write_scenario_file(const Scenario& sc, const std::string& dir) {
  emit(dir, "scenario.csv", [&](std::ostream& s) {
    s << "seed,source,destination\n" << fmt::format("{},{},{}\n", sc.seed, sc.source, sc.destination);
  });
  save_topology_file(sc.network, (fs::path(dir) / "topology.txt").string());
}

int cmd_train(const Options& o, std::ostream& err) {
  const auto c = load_config(o);
  const auto dir = output_dir(o, c.output_dir);
  const auto agents = selected_agents(c, o.agent);
  const auto seed = c.seeds.front();
  if (o.dry_run) return kOk;
  const auto scenario = make_scenario(c, seed);
  ensure_dir(dir);
  write_scenario_file(scenario, dir);
  std::vector<TrainingRun> runs(agents.size());
  parallel_for(static_cast<int>(agents.size()), o.jobs, [&](int i) {
    runs[static_cast<std::size_t>(i)] =
        run_training(c, scenario, agents[static_cast<std::size_t>(i)], seed, c.episodes, c.attacks);
  });
  emit(dir, "episodes.csv", [&](std::ostream& s) { write_episode_table(runs, s); });
  for (const auto& run : runs) {
    emit(dir, fmt::format("qtable_{}.csv", run.agent), [&](std::ostream& s) { save_qtable(run.q, s); });
    ScenarioSpec spec = scenario_spec(c, scenario);
    spec.network = run.final_network;
    const auto record = evaluate(run.q, spec, c.scenario.eval_queue);
    emit(dir, fmt::format("evaluation_{}.csv", run.agent),
         [&](std::ostream& s) { write_evaluation_table(record, s); });
    if (o.verbosity > 0) {
      err << fmt::format("{}: {} path [{}] delay {:.6g} s regret {:.3g}\n", run.agent,
                         to_string(record.status), fmt::join(record.path, " "), record.path_delay,
                         record.regret);
    }
  }
  return kOk;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
  const auto c = load_config(o);
  const auto scenario = make_scenario(c, c.seeds.front());
  std::ifstream in(o.qtable_path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", o.qtable_path));
  const auto q = load_qtable(in);
  if (q.size() != scenario.network.size()) {
    throw ConfigError(fmt::format("q-table has {} states but the scenario has {} nodes", q.size(),
                                  scenario.network.size()));
  }
  ScenarioSpec spec = scenario_spec(c, scenario);
  if (!o.pre_attack) {
    // Replays the attack schedule exactly as training applied it.
    const std::vector<int> keep = c.scenario.protect_endpoints
                                      ? std::vector<int>{scenario.source, scenario.destination}
                                      : std::vector<int>{};
    for (const auto& event : c.attacks) {
      const auto targets = select_targets(node_importance(spec.network), event.count, event.model,
                                          keep, attack_seed(scenario.seed, event.episode));
      spec.network = apply_attack(spec.network, targets, keep);
    }
  }
  const auto record = evaluate(q, spec, c.scenario.eval_queue);
  if (o.out.empty()) {
    write_evaluation_table(record, out);
  } else {
    std::ostringstream text;
    write_evaluation_table(record, text);
    ensure_parent(o.out);
    write_text_file(o.out, text.str());
  }
  return record.converged() ? kOk : kScenario;
}

int cmd_experiment(const Options& o, std::ostream& err) {
  const auto c = load_config(o);
  if (o.dry_run) {
    err << fmt::format("config ok: {} agents, {} seeds, {} episodes\n", c.agents.size(),
                       c.seeds.size(), c.episodes);
    return kOk;
  }
  const auto dir = output_dir(o, c.output_dir);
  const auto results = run_experiment(c, o.jobs);
  const auto files = write_experiment_outputs(results, c, dir);
  if (o.verbosity > 0) err << fmt::format("wrote {} to {}\n", fmt::join(files, ", "), dir);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"UAV routing simulator: link budgets, node-importance attacks, tabular RL recovery"};
  app.require_subcommand(1, 1);
  app.add_flag("-v,--verbose", o.verbosity, "More diagnostics on stderr");

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Seed (overrides the config's seed list)");
    sub->add_option("--out", o.out, "Output file or directory");
  };

  auto* generate = app.add_subcommand("generate", "Place UAVs and write a topology file");
  add_common(generate);
  generate->add_option("-n,--nodes", o.nodes, "Number of UAVs")->check(CLI::Range(2, 100000));
  generate->add_option("--area", o.area, "Area width and depth (m)")->expected(2);
  generate->add_option("--heights", o.heights, "Height range (m)")->expected(2);
  generate->add_option("--bounds", o.bounds, "Link range o_min o_max (m)")->expected(2);

  auto* rank = app.add_subcommand("rank", "Node and edge importance tables for a topology");
  add_common(rank);
  rank->add_option("--topology", o.topology_path, "Topology file")->required();

  auto* attack = app.add_subcommand("attack", "Attack the highest-ranked (or random) nodes");
  add_common(attack);
  attack->add_option("--topology", o.topology_path, "Topology file")->required();
  attack->add_option("--count", o.count, "Number of targets")->check(CLI::NonNegativeNumber);
  attack->add_option("--model", o.model, "deliberate|random")
      ->check(CLI::IsMember({"deliberate", "random"}));
  attack->add_option("--protect", o.protect, "Node ids that must not be attacked");

  auto* train = app.add_subcommand("train", "Train the configured agents on one scenario");
  add_common(train);
  train->add_option("--config", o.config_path, "YAML config");
  train->add_option("--agent", o.agent, "Train only this variant");
  train->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
  train->add_flag("--dry-run", o.dry_run, "Validate the config and stop");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a saved Q-table's greedy path");
  add_common(evaluate_cmd);
  evaluate_cmd->add_option("--config", o.config_path, "YAML config");
  evaluate_cmd->add_option("--qtable", o.qtable_path, "Q-table file")->required();
  evaluate_cmd->add_flag("--pre-attack", o.pre_attack, "Evaluate on the network before attacks");

  auto* experiment = app.add_subcommand("experiment", "Run the full comparison and sweep");
  add_common(experiment);
  experiment->add_option("--config", o.config_path, "YAML config");
  experiment->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
  experiment->add_flag("--dry-run", o.dry_run, "Validate the config and write nothing");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (generate->parsed()) return cmd_generate(o, out);
    if (rank->parsed()) return cmd_rank(o, out);
    if (attack->parsed()) return cmd_attack(o, out, err);
    if (train->parsed()) return cmd_train(o, err);
    if (evaluate_cmd->parsed()) return cmd_evaluate(o, out);
    if (experiment->parsed()) return cmd_experiment(o, err);
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kIo;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const ScenarioError& e) {
    err << "scenario error: " << e.what() << "\n";
    return kScenario;
  } catch (const ContractError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace uavroute::cli
