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

#ifndef TOPOMAP__GRAPH_HPP_
#define TOPOMAP__GRAPH_HPP_

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace topomap
{

using NodeId = std::string;
using TopicId = std::string;

/// Where a node executes.
enum class NodeImpl { HW, SW };

/// How a topic is realized: software-mapped, hardware-mapped, or gateway.
enum class TopicImpl { SMT, HMT, GW };

std::string_view to_string(NodeImpl impl);
std::string_view to_string(TopicImpl impl);
NodeImpl node_impl_from_string(std::string_view text);
TopicImpl topic_impl_from_string(std::string_view text);

class GraphError : public std::runtime_error
{
public:
  enum class Kind { Syntax, Schema, UnknownEndpoint, Duplicate, InvalidValue, UnknownTopic };

  GraphError(Kind kind, const std::string & what)
  : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept {return kind_;}

private:
  Kind kind_;
};

struct TopicInfo
{
  TopicId id;
  std::uint64_t message_size_bytes = 0;
  double publish_rate_hz = 0.0;

  bool operator==(const TopicInfo &) const = default;
};

struct PubEdge
{
  NodeId node;
  TopicId topic;

  auto operator<=>(const PubEdge &) const = default;
};

struct SubEdge
{
  TopicId topic;
  NodeId node;

  auto operator<=>(const SubEdge &) const = default;
};

/// Bipartite publish/subscribe graph of nodes and topics.
///
/// Immutable once built. All containers are ordered, so iteration is
/// lexicographic by id.
class ComputationGraph
{
public:
  ComputationGraph() = default;

  /// Validates and builds a graph. Throws GraphError on duplicate ids,
  /// overlapping node/topic namespaces, dangling edge endpoints, duplicate
  /// edges, or non-positive workload annotations.
  static ComputationGraph build(
    const std::vector<NodeId> & nodes,
    const std::vector<TopicInfo> & topics,
    const std::vector<PubEdge> & publishes,
    const std::vector<SubEdge> & subscribes);

  const std::set<NodeId> & nodes() const {return nodes_;}
  const std::map<TopicId, TopicInfo> & topics() const {return topics_;}
  const std::set<PubEdge> & pub_edges() const {return pub_edges_;}
  const std::set<SubEdge> & sub_edges() const {return sub_edges_;}

  bool has_node(const NodeId & id) const {return nodes_.count(id) != 0;}
  bool has_topic(const TopicId & id) const {return topics_.count(id) != 0;}
  const TopicInfo & topic(const TopicId & id) const;

  /// Topics without publishers or subscribers. These are legal but suspicious.
  const std::vector<std::string> & warnings() const {return warnings_;}

  bool operator==(const ComputationGraph & other) const
  {
    return nodes_ == other.nodes_ && topics_ == other.topics_ &&
           pub_edges_ == other.pub_edges_ && sub_edges_ == other.sub_edges_;
  }

private:
  std::set<NodeId> nodes_;
  std::map<TopicId, TopicInfo> topics_;
  std::set<PubEdge> pub_edges_;
  std::set<SubEdge> sub_edges_;
  std::vector<std::string> warnings_;
};

/// Publish edges targeting `topic`. Throws GraphError(UnknownTopic).
std::vector<PubEdge> pub_edges_of(const ComputationGraph & graph, const TopicId & topic);
/// Subscribe edges leaving `topic`. Throws GraphError(UnknownTopic).
std::vector<SubEdge> sub_edges_of(const ComputationGraph & graph, const TopicId & topic);

std::vector<NodeId> publishers_of(const ComputationGraph & graph, const TopicId & topic);
std::vector<NodeId> subscribers_of(const ComputationGraph & graph, const TopicId & topic);

/// Total assignment of nodes to hardware or software.
class NodeMapping
{
public:
  NodeMapping() = default;
  explicit NodeMapping(std::map<NodeId, NodeImpl> assignment)
  : assignment_(std::move(assignment)) {}

  /// Every node true in `hw` maps to HW, all others to SW.
  static NodeMapping with_hardware(const ComputationGraph & graph, const std::set<NodeId> & hw);

  NodeImpl at(const NodeId & node) const;
  bool is_hw(const NodeId & node) const {return at(node) == NodeImpl::HW;}
  void set(const NodeId & node, NodeImpl impl) {assignment_[node] = impl;}
  const std::map<NodeId, NodeImpl> & assignment() const {return assignment_;}

  /// Throws GraphError unless the mapping covers exactly the graph's nodes.
  void validate(const ComputationGraph & graph) const;

  bool operator==(const NodeMapping &) const = default;

private:
  std::map<NodeId, NodeImpl> assignment_;
};

/// Total assignment of topics to SMT, HMT or GW.
class CommMapping
{
public:
  CommMapping() = default;
  explicit CommMapping(std::map<TopicId, TopicImpl> assignment)
  : assignment_(std::move(assignment)) {}

  TopicImpl at(const TopicId & topic) const;
  void set(const TopicId & topic, TopicImpl impl) {assignment_[topic] = impl;}
  const std::map<TopicId, TopicImpl> & assignment() const {return assignment_;}
  std::set<TopicId> topics_with(TopicImpl impl) const;

  void validate(const ComputationGraph & graph) const;

  bool operator==(const CommMapping &) const = default;

private:
  std::map<TopicId, TopicImpl> assignment_;
};

/// Graph description plus the optional node mapping it may carry.
struct GraphDocument
{
  ComputationGraph graph;
  std::optional<NodeMapping> node_mapping;
};

/// Parses a graph-description JSON document. Syntax errors report the byte
/// offset of the failure.
GraphDocument parse_graph_document(std::string_view text);
ComputationGraph parse_graph(std::string_view text);

std::string serialize_graph(
  const ComputationGraph & graph,
  const std::optional<NodeMapping> & node_mapping = std::nullopt);

}  // namespace topomap

#endif  // TOPOMAP__GRAPH_HPP_
