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

#ifndef TOPOMAP__SIM_HPP_
#define TOPOMAP__SIM_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "topomap/graph.hpp"
#include "topomap/platform.hpp"

namespace topomap
{

enum class TraceKind
{
  PUBLISH,
  MEMIF_XFER_START,
  MEMIF_XFER_END,
  HMT_DELIVER,
  SMT_DELIVER,
  GW_ACTION,
};

std::string_view to_string(TraceKind kind);

struct TraceEvent
{
  /// Virtual time in nanoseconds.
  std::int64_t time_ns = 0;
  TraceKind kind = TraceKind::PUBLISH;
  /// Id of the originally published message. Gateway copies keep the id of
  /// the message they forward.
  std::uint64_t message_id = 0;
  std::string endpoint;
  /// Payload size for PUBLISH and MEMIF events, 0 otherwise.
  std::uint64_t bytes = 0;
  /// Action name for GW_ACTION events.
  std::string detail;

  bool operator==(const TraceEvent &) const = default;
};

struct TracedMessage
{
  std::uint64_t id = 0;
  TopicId topic;
  NodeId publisher;
  std::uint64_t size_bytes = 0;
  std::int64_t publish_ns = 0;

  bool operator==(const TracedMessage &) const = default;
};

struct SimTrace
{
  std::vector<TraceEvent> events;
  std::vector<TracedMessage> messages;
  /// Subscribers per topic with their placement, for stats and checks.
  std::map<TopicId, std::vector<std::pair<NodeId, NodeImpl>>> subscribers;
  std::map<TopicId, TopicImpl> topic_impl;
  /// Gateway republications that reached the gateway's own subscriber.
  std::size_t loop_injections = 0;
  std::size_t discards = 0;
  /// End-to-end samples when a chain was requested, in microseconds.
  std::vector<double> chain_latencies_us;

  bool operator==(const SimTrace &) const = default;
};

/// Runs the scenario to quiescence. Deterministic for a given
/// (scenario, platform): identical inputs produce identical traces.
///
/// Throws SimulationError for inconsistent mappings or workload entries
/// without a publish edge.
SimTrace simulate(const Scenario & scenario, const PlatformModel & platform);

/// CSV with columns timestamp_us,kind,message_id,endpoint.
std::string trace_to_csv(const SimTrace & trace);

struct SubscriberStats
{
  TopicId topic;
  NodeId subscriber;
  NodeImpl impl = NodeImpl::SW;
  std::size_t count = 0;
  double mean_us = 0.0;
  double max_us = 0.0;
};

struct TopicStats
{
  TopicId topic;
  std::size_t messages = 0;
  /// Mean over messages of the slowest hardware subscriber's time.
  std::optional<double> t_trans_hw_us;
  /// Mean over messages of the slowest software subscriber's time.
  std::optional<double> t_trans_sw_us;
};

struct TransferStats
{
  std::vector<SubscriberStats> per_subscriber;
  std::map<TopicId, TopicStats> per_topic;
};

/// Throws SimulationError("incomplete trace") if any published message
/// misses a delivery to one of its topic's subscribers.
TransferStats compute_stats(const SimTrace & trace);

/// CSV with per-(topic, subscriber) rows.
std::string stats_to_csv(const TransferStats & stats);

struct ChainResult
{
  double mean_us = 0.0;
  double stddev_us = 0.0;
  std::vector<double> samples_us;
};

/// End-to-end latency along `chain`: the head fires per its workload
/// entries, every later node republishes on the next chain topic after its
/// compute delay. Latency runs from the head firing to the last node
/// finishing its compute. Throws SimulationError for a disconnected chain
/// or a head without workload.
ChainResult run_chain_scenario(
  const Scenario & scenario, const PlatformModel & platform, const std::vector<NodeId> & chain);

/// Topics linking consecutive chain nodes (lexicographically first when
/// several qualify).
std::vector<TopicId> chain_topics(const ComputationGraph & graph, const std::vector<NodeId> & chain);

}  // namespace topomap

#endif  // TOPOMAP__SIM_HPP_
