// Copyright 2026 The topomap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "topomap/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "topomap/calibrate.hpp"
#include "topomap/experiments.hpp"
#include "topomap/gateway.hpp"
#include "topomap/mapping.hpp"
#include "topomap/platform.hpp"
#include "topomap/sim.hpp"

namespace topomap
{

namespace
{

namespace fs = std::filesystem;
using json = nlohmann::json;

// Raised for unreadable files and bad flag values.
class InputError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

std::string read_input(const std::string & path)
{
  try {
    return read_text_file(path);
  } catch (const std::runtime_error & e) {
    throw InputError(e.what());
  }
}

std::optional<std::uint64_t> seed_override()
{
  const char * env = std::getenv("TOPOMAP_SEED");
  if (env == nullptr || *env == '\0') {
    return std::nullopt;
  }
  char * end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == nullptr || *end != '\0') {
    throw InputError("TOPOMAP_SEED must be a non-negative integer, got \"" + std::string(env) + "\"");
  }
  return v;
}

PlatformModel load_platform(const std::string & path)
{
  if (path.empty()) {
    return PlatformModel{};
  }
  return platform_from_json(read_input(path));
}

MappingPolicy parse_policy(const std::string & text)
{
  try {
    return policy_from_string(text);
  } catch (const MappingError & e) {
    throw InputError(e.what());
  }
}

struct MapOptions
{
  std::string graph;
  std::string policy = "multi-hw-sub";
  std::string platform;
  std::string out;
};

int cmd_map(const MapOptions & o, std::ostream & out)
{
  const GraphDocument doc = parse_graph_document(read_input(o.graph));
  if (!doc.node_mapping) {
    throw GraphError(
            GraphError::Kind::Schema,
            "graph \"" + o.graph + "\" has no \"node_mapping\" field; the mapping engine needs "
            "a node mapping");
  }
  const MappingPolicy policy = parse_policy(o.policy);
  const CostModelParams params = cost_params_from_platform(load_platform(o.platform));
  const MappingResult result = map_communication(doc.graph, *doc.node_mapping, params, policy);

  CommMapping all_smt;
  for (const auto & [topic, info] : doc.graph.topics()) {
    (void)info;
    all_smt.set(topic, TopicImpl::SMT);
  }
  const MappingResult smt_hmt =
    map_communication(doc.graph, *doc.node_mapping, params, MappingPolicy::AlwaysSmt);
  const std::size_t c_all_smt = count_boundary_crossings(doc.graph, *doc.node_mapping, all_smt);
  const std::size_t c_smt_hmt =
    count_boundary_crossings(doc.graph, *doc.node_mapping, smt_hmt.comm_mapping);
  const std::size_t c_final =
    count_boundary_crossings(doc.graph, *doc.node_mapping, result.comm_mapping);

  json report = json::parse(mapping_report_json(result, c_final));
  report["policy"] = std::string(to_string(policy));
  report["crossings_by_stage"] = {
    {"all_smt", c_all_smt}, {"smt_hmt", c_smt_hmt}, {"final", c_final}};
  write_text_file(o.out, report.dump(2) + "\n");

  out << mapping_report_table(result, c_final);
  out << "crossings by stage: all-SMT " << c_all_smt << ", SMT+HMT " << c_smt_hmt << ", final "
      << c_final << "\n";
  return kExitOk;
}

Scenario load_scenario(const std::string & path, const PlatformModel & platform)
{
  ScenarioDocument doc = parse_scenario(read_input(path), fs::path(path).parent_path());
  if (!doc.has_comm_mapping) {
    doc.scenario.comm_mapping = map_communication(
      doc.scenario.graph, doc.scenario.node_mapping, cost_params_from_platform(platform),
      MappingPolicy::MultiHwSub).comm_mapping;
  }
  if (auto seed = seed_override()) {
    doc.scenario.seed = *seed;
  }
  return doc.scenario;
}

struct SimulateOptions
{
  std::string scenario;
  std::string platform;
  std::string trace;
  std::string stats;
};

int cmd_simulate(const SimulateOptions & o, std::ostream & out)
{
  const PlatformModel platform = load_platform(o.platform);
  const Scenario scenario = load_scenario(o.scenario, platform);
  const SimTrace trace = simulate(scenario, platform);
  const TransferStats stats = compute_stats(trace);
  write_text_file(o.trace, trace_to_csv(trace));
  write_text_file(o.stats, stats_to_csv(stats));
  out << "messages: " << trace.messages.size() << ", events: " << trace.events.size()
      << ", gateway discards: " << trace.discards << "\n";
  return kExitOk;
}

struct CompareOptions
{
  std::string scenario;
  std::string platform;
  std::string policies = "smt,multi-hw-sub";
  std::string out;
  std::size_t threads = 0;
};

int cmd_compare(const CompareOptions & o, std::ostream & out)
{
  const auto comma = o.policies.find(',');
  if (comma == std::string::npos || o.policies.find(',', comma + 1) != std::string::npos) {
    throw InputError("--policies expects exactly two policies separated by a comma");
  }
  const MappingPolicy a = parse_policy(o.policies.substr(0, comma));
  const MappingPolicy b = parse_policy(o.policies.substr(comma + 1));
  const PlatformModel platform = load_platform(o.platform);
  const std::string text = read_input(o.scenario);

  if (is_grid_document(text)) {
    GridSpec grid = parse_grid(text);
    if (auto seed = seed_override()) {
      grid.seed = *seed;
    }
    const auto rows = compare_grid(grid, platform, a, b, o.threads);
    write_text_file(o.out, comparison_csv(rows));
    out << "compared " << rows.size() << " cells\n";
    return kExitOk;
  }
  const Scenario scenario = load_scenario(o.scenario, platform);
  if (!scenario.chain.empty()) {
    const ChainComparison c = compare_chain(scenario, platform, a, b);
    write_text_file(o.out, chain_comparison_csv(c));
    out << "chain speedup: " << c.speedup << "\n";
    return kExitOk;
  }
  const auto rows = compare_scenario(scenario, platform, a, b);
  write_text_file(o.out, topic_comparison_csv(rows));
  out << "compared " << rows.size() << " topics\n";
  return kExitOk;
}

struct CalibrateOptions
{
  std::string targets;
  std::string out;
};

int cmd_calibrate(const CalibrateOptions & o, std::ostream & out, std::ostream & err)
{
  TargetsDocument doc = parse_targets(read_input(o.targets));
  if (auto seed = seed_override()) {
    doc.seed = *seed;
  }
  const CalibrationResult r = calibrate(
    doc.targets, doc.initial, simulated_speedup_evaluator(doc.repetitions, 1.0e7, doc.seed),
    doc.options);
  const std::string report = calibration_report_json(r);
  write_text_file(o.out, platform_to_json(r.model));
  write_text_file(o.out + ".residuals.json", report);
  out << report;
  if (!r.within_threshold) {
    err << "calibration residual " << r.rms_log_error << " exceeds threshold "
        << doc.options.residual_threshold << "\n";
    return kExitResidualAboveThreshold;
  }
  return kExitOk;
}

int cmd_report(const std::string & in, const std::string & out_dir, std::ostream & out)
{
  const auto rows = parse_comparison_csv(read_input(in));
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw InputError("cannot create \"" + out_dir + "\": " + ec.message());
  }
  for (const auto & [name, content] : report_series(rows)) {
    write_text_file(fs::path(out_dir) / name, content);
    out << "wrote " << (fs::path(out_dir) / name).string() << "\n";
  }
  return kExitOk;
}

int exit_code_for(const GraphError & e)
{
  switch (e.kind()) {
    case GraphError::Kind::Syntax:
    case GraphError::Kind::Schema:
      return kExitInputError;
    default:
      return kExitValidationError;
  }
}

}  // namespace

int run_cli(int argc, const char * const * argv, std::ostream & out, std::ostream & err)
{
  CLI::App app{"topomap: communication mapping and gateway simulation for ROS 2 graphs"};
  app.require_subcommand(1);

  MapOptions map_o;
  auto * map = app.add_subcommand("map", "Map topics to SMT, HMT or gateway");
  map->add_option("--graph", map_o.graph, "Graph JSON with node_mapping")->required();
  map->add_option("--policy", map_o.policy, "cost | multi-hw-sub | smt");
  map->add_option("--platform", map_o.platform, "Platform JSON for the cost model");
  map->add_option("--out", map_o.out, "Mapping report JSON")->required();

  SimulateOptions sim_o;
  auto * sim = app.add_subcommand("simulate", "Simulate a scenario");
  sim->add_option("--scenario", sim_o.scenario, "Scenario JSON")->required();
  sim->add_option("--platform", sim_o.platform, "Platform JSON");
  sim->add_option("--trace", sim_o.trace, "Trace CSV")->required();
  sim->add_option("--stats", sim_o.stats, "Stats CSV")->required();

  CompareOptions cmp_o;
  auto * cmp = app.add_subcommand("compare", "Compare two mapping policies");
  cmp->add_option("--scenario", cmp_o.scenario, "Scenario or experiment-grid JSON")->required();
  cmp->add_option("--platform", cmp_o.platform, "Platform JSON");
  cmp->add_option("--policies", cmp_o.policies, "Two policies, baseline first: A,B");
  cmp->add_option("--out", cmp_o.out, "Comparison CSV")->required();
  cmp->add_option("--threads", cmp_o.threads, "Worker threads for grid cells (0 = auto)");

  CalibrateOptions cal_o;
  auto * cal = app.add_subcommand("calibrate", "Fit the platform model to measured speedups");
  cal->add_option("--targets", cal_o.targets, "Targets JSON")->required();
  cal->add_option("--out", cal_o.out, "Calibrated platform JSON")->required();

  std::string fsm_out;
  auto * fsm = app.add_subcommand("fsm-export", "Export the gateway transition table");
  fsm->add_option("--out", fsm_out, "Transition table JSON")->required();

  std::string report_in;
  std::string report_dir;
  auto * rep = app.add_subcommand("report", "Split a grid comparison into plot series");
  rep->add_option("--in", report_in, "Grid comparison CSV")->required();
  rep->add_option("--out-dir", report_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp & e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError & e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  try {
    if (map->parsed()) {
      return cmd_map(map_o, out);
    }
    if (sim->parsed()) {
      return cmd_simulate(sim_o, out);
    }
    if (cmp->parsed()) {
      return cmd_compare(cmp_o, out);
    }
    if (cal->parsed()) {
      return cmd_calibrate(cal_o, out, err);
    }
    if (fsm->parsed()) {
      write_text_file(fsm_out, gateway::transition_table_json());
      return kExitOk;
    }
    if (rep->parsed()) {
      return cmd_report(report_in, report_dir, out);
    }
  } catch (const InputError & e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const GraphError & e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const MappingError & e) {
    err << "error: " << e.what() << "\n";
    return kExitValidationError;
  } catch (const SimulationError & e) {
    err << "error: " << e.what() << "\n";
    return kExitValidationError;
  } catch (const CalibrationError & e) {
    err << "error: " << e.what() << "\n";
    return kExitValidationError;
  } catch (const gateway::ProtocolError & e) {
    err << "error: " << e.what() << "\n";
    return kExitValidationError;
  } catch (const std::runtime_error & e) {
    // write_text_file failures
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace topomap
