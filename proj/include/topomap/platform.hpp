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

#ifndef TOPOMAP__PLATFORM_HPP_
#define TOPOMAP__PLATFORM_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "topomap/graph.hpp"
#include "topomap/mapping.hpp"

namespace topomap
{

class SimulationError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Timing parameters of the simulated cSoC.
///
/// Absolute values are only meaningful after calibration against measured
/// speedups; the simulator is used for ratios and trends.
struct PlatformModel
{
  /// Shared memory port of the hardware threads, split evenly among the
  /// transfers active at any instant.
  double memif_bandwidth_bytes_per_s = 1.0e9;
  /// Per-channel streaming bandwidth of hardware-mapped topics.
  double hmt_bandwidth_bytes_per_s = 1.0e9;
  /// Fixed per-message latency of the streaming network.
  double hmt_latency_us = 200.0;
  /// Hardware thread <-> delegate request/response over the OSIF.
  double osif_roundtrip_us = 137.0;
  /// Delegate-side publish call on behalf of a hardware publisher.
  double delegate_publish_us = 100.0;
  /// Software DDS delivery: the intercept is dispatch CPU time per reader of
  /// the publication, the slope is per-byte cost at a software subscriber.
  AffineLatency sw_dds_latency{10.0, 4.67e-3};
  /// Copy from a hardware-produced buffer into a DDS sample at publish time.
  double sw_copy_bandwidth_bytes_per_s = 4.0e9;
  /// Delegate latencies are scaled by a uniform factor in [1-j, 1+j].
  double jitter_fraction = 0.05;

  /// Throws SimulationError unless every rate and latency is positive and
  /// the jitter fraction lies in [0, 1).
  void validate() const;

  bool operator==(const PlatformModel &) const = default;
};

PlatformModel platform_from_json(std::string_view text);
std::string platform_to_json(const PlatformModel & model);

/// Cost-model view of a platform, for the mapping engine's estimators.
CostModelParams cost_params_from_platform(const PlatformModel & model);

struct WorkloadEntry
{
  NodeId publisher;
  TopicId topic;
  std::uint64_t count = 1;
  std::uint64_t size_bytes = 1;
  double period_us = 1.0e6;
  double start_us = 0.0;
};

struct Scenario
{
  ComputationGraph graph;
  NodeMapping node_mapping;
  CommMapping comm_mapping;
  std::vector<WorkloadEntry> workload;
  std::uint64_t seed = 42;
  /// Per-node processing delay between trigger and publish; defaults to 0.
  std::map<NodeId, double> compute_us;
  /// Optional node chain for end-to-end latency measurement.
  std::vector<NodeId> chain;

  double compute_of(const NodeId & node) const;

  /// Throws GraphError/SimulationError for incomplete or inconsistent
  /// mappings and for workload entries without a matching publish edge.
  void validate() const;
};

/// Parsed scenario file. The comm_mapping may be absent when the caller
/// derives it from a mapping policy.
struct ScenarioDocument
{
  Scenario scenario;
  bool has_comm_mapping = false;
};

/// Parses a scenario document. `graph` may be an inline graph object or a
/// path relative to `base_dir`. The node mapping comes from the scenario's
/// `node_mapping` or, failing that, from the graph document.
ScenarioDocument parse_scenario(std::string_view text, const std::filesystem::path & base_dir);

std::string read_text_file(const std::filesystem::path & path);
void write_text_file(const std::filesystem::path & path, std::string_view content);

}  // namespace topomap

#endif  // TOPOMAP__PLATFORM_HPP_
