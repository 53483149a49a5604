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

#ifndef TOPOMAP__MAPPING_HPP_
#define TOPOMAP__MAPPING_HPP_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "topomap/graph.hpp"

namespace topomap
{

class MappingError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

enum class TopicClass { ALL_SW, ALL_HW, MIXED };

enum class MappingRule { ALL_SW, ALL_HW, MIXED_COST };

/// How MIXED topics are resolved.
///   Cost        cheaper of the two estimators, ties go to SMT
///   MultiHwSub  GW iff the topic has at least two hardware subscribers
///   AlwaysSmt   baseline, every MIXED topic stays in software
enum class MappingPolicy { Cost, MultiHwSub, AlwaysSmt };

std::string_view to_string(TopicClass c);
std::string_view to_string(MappingRule r);
std::string_view to_string(MappingPolicy p);
/// Accepts the CLI spellings "cost", "multi-hw-sub" and "smt".
MappingPolicy policy_from_string(std::string_view text);

/// latency(bytes) = intercept_us + us_per_byte * bytes
struct AffineLatency
{
  double intercept_us = 0.0;
  double us_per_byte = 0.0;

  double at(double bytes) const {return intercept_us + us_per_byte * bytes;}
  bool operator==(const AffineLatency &) const = default;
};

struct CostModelParams
{
  double memif_bandwidth_bytes_per_s = 1e9;
  double hmt_bandwidth_bytes_per_s = 1e9;
  double gateway_fixed_overhead_us = 100.0;
  double delegate_roundtrip_us = 100.0;
  AffineLatency sw_dds_latency{10.0, 1e-3};

  /// Throws MappingError unless all values are positive and the streaming
  /// bandwidth is at least the memory-port bandwidth.
  void validate() const;
};

struct MappingRationale
{
  TopicId topic;
  TopicImpl chosen = TopicImpl::SMT;
  MappingRule rule = MappingRule::ALL_SW;
  std::size_t hw_subscriber_count = 0;
  std::size_t hw_publisher_count = 0;
  std::optional<double> estimated_cost_smt_us;
  std::optional<double> estimated_cost_gw_us;
};

struct MappingResult
{
  CommMapping comm_mapping;
  std::vector<MappingRationale> rationales;
};

/// Throws GraphError for an unknown topic or an unmapped endpoint.
TopicClass classify_topic(
  const ComputationGraph & graph, const NodeMapping & nm, const TopicId & topic);

MappingResult map_communication(
  const ComputationGraph & graph, const NodeMapping & nm, const CostModelParams & params,
  MappingPolicy policy);

/// Closed forms behind the estimators, exposed for sweeps over size and
/// subscriber count without building a graph.
double smt_cost_us(double size_bytes, std::size_t hw_subscribers, const CostModelParams & params);
double gw_cost_us(double size_bytes, const CostModelParams & params);

/// Worst-case per-message time to the slowest subscriber if the MIXED topic
/// stays software-mapped: every hardware subscriber pulls its own copy over
/// the shared memory port.
double estimate_smt_cost_us(
  const TopicId & topic, const ComputationGraph & graph, const NodeMapping & nm,
  const CostModelParams & params);

/// Same as estimate_smt_cost_us, but with the topic realized as a gateway:
/// one memory-port crossing plus one streaming transfer.
double estimate_gw_cost_us(
  const TopicId & topic, const ComputationGraph & graph, const NodeMapping & nm,
  const CostModelParams & params);

/// Number of publish/subscribe edges whose traffic crosses the
/// hardware/software boundary. SMT topics: edges touching a HW node.
/// HMT topics: none. GW topics: edges touching a SW node.
/// Throws MappingError for an HMT topic with a software endpoint.
std::size_t count_boundary_crossings(
  const ComputationGraph & graph, const NodeMapping & nm, const CommMapping & cm);

/// Mapping report document: comm_mapping, rationales, boundary_crossings.
std::string mapping_report_json(const MappingResult & result, std::size_t boundary_crossings);

/// Fixed-width table of the rationales, for terminals.
std::string mapping_report_table(const MappingResult & result, std::size_t boundary_crossings);

}  // namespace topomap

#endif  // TOPOMAP__MAPPING_HPP_
