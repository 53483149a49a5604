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

#include "topomap/graph.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "json.hpp"

namespace topomap
{

using json = nlohmann::json;

std::string_view to_string(NodeImpl impl)
{
  return impl == NodeImpl::HW ? "HW" : "SW";
}

std::string_view to_string(TopicImpl impl)
{
  switch (impl) {
    case TopicImpl::SMT: return "SMT";
    case TopicImpl::HMT: return "HMT";
    case TopicImpl::GW: return "GW";
  }
  return "?";
}

NodeImpl node_impl_from_string(std::string_view text)
{
  if (text == "HW") {
    return NodeImpl::HW;
  }
  if (text == "SW") {
    return NodeImpl::SW;
  }
  throw GraphError(
    GraphError::Kind::InvalidValue,
    "node mapping must be \"HW\" or \"SW\", got \"" + std::string(text) + "\"");
}

TopicImpl topic_impl_from_string(std::string_view text)
{
  if (text == "SMT") {
    return TopicImpl::SMT;
  }
  if (text == "HMT") {
    return TopicImpl::HMT;
  }
  if (text == "GW") {
    return TopicImpl::GW;
  }
  throw GraphError(
    GraphError::Kind::InvalidValue,
    "topic mapping must be \"SMT\", \"HMT\" or \"GW\", got \"" + std::string(text) + "\"");
}

ComputationGraph ComputationGraph::build(
  const std::vector<NodeId> & nodes,
  const std::vector<TopicInfo> & topics,
  const std::vector<PubEdge> & publishes,
  const std::vector<SubEdge> & subscribes)
{
  using Kind = GraphError::Kind;
  ComputationGraph g;

  for (const auto & n : nodes) {
    if (n.empty()) {
      throw GraphError(Kind::InvalidValue, "node id must be a non-empty string");
    }
    if (!g.nodes_.insert(n).second) {
      throw GraphError(Kind::Duplicate, "duplicate node id \"" + n + "\"");
    }
  }
  for (const auto & t : topics) {
    if (t.id.empty()) {
      throw GraphError(Kind::InvalidValue, "topic id must be a non-empty string");
    }
    if (g.nodes_.count(t.id) != 0) {
      throw GraphError(Kind::Duplicate, "id \"" + t.id + "\" is used by both a node and a topic");
    }
    if (t.message_size_bytes == 0) {
      throw GraphError(
        Kind::InvalidValue, "topic \"" + t.id + "\": message_size_bytes must be positive");
    }
    if (!(t.publish_rate_hz > 0.0) || !std::isfinite(t.publish_rate_hz)) {
      throw GraphError(
        Kind::InvalidValue, "topic \"" + t.id + "\": publish_rate_hz must be positive");
    }
    if (!g.topics_.emplace(t.id, t).second) {
      throw GraphError(Kind::Duplicate, "duplicate topic id \"" + t.id + "\"");
    }
  }

  auto check_node = [&g](const NodeId & n, const char * where) {
      if (!g.has_node(n)) {
        throw GraphError(
          Kind::UnknownEndpoint, std::string(where) + " references undeclared node \"" + n + "\"");
      }
    };
  auto check_topic = [&g](const TopicId & t, const char * where) {
      if (!g.has_topic(t)) {
        throw GraphError(
          Kind::UnknownEndpoint, std::string(where) + " references undeclared topic \"" + t + "\"");
      }
    };

  for (const auto & e : publishes) {
    check_node(e.node, "publish edge");
    check_topic(e.topic, "publish edge");
    if (!g.pub_edges_.insert(e).second) {
      throw GraphError(
        Kind::Duplicate, "duplicate publish edge " + e.node + " -> " + e.topic);
    }
  }
  for (const auto & e : subscribes) {
    check_topic(e.topic, "subscribe edge");
    check_node(e.node, "subscribe edge");
    if (!g.sub_edges_.insert(e).second) {
      throw GraphError(
        Kind::Duplicate, "duplicate subscribe edge " + e.topic + " -> " + e.node);
    }
  }

  for (const auto & [id, info] : g.topics_) {
    (void)info;
    const bool has_pub = std::any_of(
      g.pub_edges_.begin(), g.pub_edges_.end(), [&](const PubEdge & e) {return e.topic == id;});
    const bool has_sub = std::any_of(
      g.sub_edges_.begin(), g.sub_edges_.end(), [&](const SubEdge & e) {return e.topic == id;});
    if (!has_pub) {
      g.warnings_.push_back("topic \"" + id + "\" has no publishers");
    }
    if (!has_sub) {
      g.warnings_.push_back("topic \"" + id + "\" has no subscribers");
    }
  }
  return g;
}

const TopicInfo & ComputationGraph::topic(const TopicId & id) const
{
  auto it = topics_.find(id);
  if (it == topics_.end()) {
    throw GraphError(GraphError::Kind::UnknownTopic, "unknown topic \"" + id + "\"");
  }
  return it->second;
}

std::vector<PubEdge> pub_edges_of(const ComputationGraph & graph, const TopicId & topic)
{
  (void)graph.topic(topic);
  std::vector<PubEdge> out;
  for (const auto & e : graph.pub_edges()) {
    if (e.topic == topic) {
      out.push_back(e);
    }
  }
  return out;
}

std::vector<SubEdge> sub_edges_of(const ComputationGraph & graph, const TopicId & topic)
{
  (void)graph.topic(topic);
  // sub_edges are ordered by topic first, so the matches are contiguous.
  std::vector<SubEdge> out;
  auto it = graph.sub_edges().lower_bound(SubEdge{topic, ""});
  for (; it != graph.sub_edges().end() && it->topic == topic; ++it) {
    out.push_back(*it);
  }
  return out;
}

std::vector<NodeId> publishers_of(const ComputationGraph & graph, const TopicId & topic)
{
  std::vector<NodeId> out;
  for (auto & e : pub_edges_of(graph, topic)) {
    out.push_back(std::move(e.node));
  }
  return out;
}

std::vector<NodeId> subscribers_of(const ComputationGraph & graph, const TopicId & topic)
{
  std::vector<NodeId> out;
  for (auto & e : sub_edges_of(graph, topic)) {
    out.push_back(std::move(e.node));
  }
  return out;
}

NodeMapping NodeMapping::with_hardware(
  const ComputationGraph & graph, const std::set<NodeId> & hw)
{
  NodeMapping m;
  for (const auto & n : graph.nodes()) {
    m.assignment_[n] = hw.count(n) ? NodeImpl::HW : NodeImpl::SW;
  }
  return m;
}

NodeImpl NodeMapping::at(const NodeId & node) const
{
  auto it = assignment_.find(node);
  if (it == assignment_.end()) {
    throw GraphError(GraphError::Kind::UnknownEndpoint, "node \"" + node + "\" is not mapped");
  }
  return it->second;
}

void NodeMapping::validate(const ComputationGraph & graph) const
{
  for (const auto & n : graph.nodes()) {
    if (assignment_.count(n) == 0) {
      throw GraphError(GraphError::Kind::UnknownEndpoint, "node \"" + n + "\" is not mapped");
    }
  }
  for (const auto & [n, impl] : assignment_) {
    (void)impl;
    if (!graph.has_node(n)) {
      throw GraphError(
        GraphError::Kind::UnknownEndpoint, "node mapping references undeclared node \"" + n + "\"");
    }
  }
}

TopicImpl CommMapping::at(const TopicId & topic) const
{
  auto it = assignment_.find(topic);
  if (it == assignment_.end()) {
    throw GraphError(GraphError::Kind::UnknownTopic, "topic \"" + topic + "\" is not mapped");
  }
  return it->second;
}

std::set<TopicId> CommMapping::topics_with(TopicImpl impl) const
{
  std::set<TopicId> out;
  for (const auto & [t, i] : assignment_) {
    if (i == impl) {
      out.insert(t);
    }
  }
  return out;
}

void CommMapping::validate(const ComputationGraph & graph) const
{
  for (const auto & [t, info] : graph.topics()) {
    (void)info;
    if (assignment_.count(t) == 0) {
      throw GraphError(GraphError::Kind::UnknownTopic, "topic \"" + t + "\" is not mapped");
    }
  }
  for (const auto & [t, impl] : assignment_) {
    (void)impl;
    if (!graph.has_topic(t)) {
      throw GraphError(
        GraphError::Kind::UnknownTopic, "comm mapping references undeclared topic \"" + t + "\"");
    }
  }
}

namespace
{

const json & require(const json & obj, const char * key, const char * context)
{
  if (!obj.is_object()) {
    throw GraphError(GraphError::Kind::Schema, std::string(context) + " must be an object");
  }
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw GraphError(
      GraphError::Kind::Schema, std::string(context) + " is missing field \"" + key + "\"");
  }
  return *it;
}

std::string require_string(const json & obj, const char * key, const char * context)
{
  const json & v = require(obj, key, context);
  if (!v.is_string()) {
    throw GraphError(
      GraphError::Kind::Schema, std::string(context) + "." + key + " must be a string");
  }
  return v.get<std::string>();
}

const json & require_array(const json & obj, const char * key)
{
  const json & v = require(obj, key, "graph document");
  if (!v.is_array()) {
    throw GraphError(GraphError::Kind::Schema, std::string("\"") + key + "\" must be an array");
  }
  return v;
}

}  // namespace

GraphDocument parse_graph_document(std::string_view text)
{
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error & e) {
    throw GraphError(
      GraphError::Kind::Syntax,
      "syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) {
    throw GraphError(GraphError::Kind::Schema, "graph document must be a JSON object");
  }

  std::vector<NodeId> nodes;
  for (const auto & n : require_array(doc, "nodes")) {
    nodes.push_back(require_string(n, "id", "node"));
  }

  std::vector<TopicInfo> topics;
  for (const auto & t : require_array(doc, "topics")) {
    TopicInfo info;
    info.id = require_string(t, "id", "topic");
    const json & size = require(t, "message_size_bytes", "topic");
    if (!size.is_number_integer()) {
      throw GraphError(
        GraphError::Kind::InvalidValue,
        "topic \"" + info.id + "\": message_size_bytes must be a positive integer");
    }
    if (size.get<std::int64_t>() <= 0) {
      throw GraphError(
        GraphError::Kind::InvalidValue,
        "topic \"" + info.id + "\": message_size_bytes must be positive");
    }
    info.message_size_bytes = size.get<std::uint64_t>();
    const json & rate = require(t, "publish_rate_hz", "topic");
    if (!rate.is_number()) {
      throw GraphError(
        GraphError::Kind::InvalidValue,
        "topic \"" + info.id + "\": publish_rate_hz must be a number");
    }
    info.publish_rate_hz = rate.get<double>();
    topics.push_back(std::move(info));
  }

  std::vector<PubEdge> pubs;
  for (const auto & e : require_array(doc, "publishes")) {
    pubs.push_back({require_string(e, "node", "publish edge"),
        require_string(e, "topic", "publish edge")});
  }
  std::vector<SubEdge> subs;
  for (const auto & e : require_array(doc, "subscribes")) {
    subs.push_back({require_string(e, "topic", "subscribe edge"),
        require_string(e, "node", "subscribe edge")});
  }

  GraphDocument out;
  out.graph = ComputationGraph::build(nodes, topics, pubs, subs);

  if (auto it = doc.find("node_mapping"); it != doc.end()) {
    if (!it->is_object()) {
      throw GraphError(GraphError::Kind::Schema, "\"node_mapping\" must be an object");
    }
    std::map<NodeId, NodeImpl> assignment;
    for (const auto & [node, impl] : it->items()) {
      if (!impl.is_string()) {
        throw GraphError(
          GraphError::Kind::Schema, "node_mapping entry for \"" + node + "\" must be a string");
      }
      assignment[node] = node_impl_from_string(impl.get<std::string>());
    }
    NodeMapping mapping(std::move(assignment));
    mapping.validate(out.graph);
    out.node_mapping = std::move(mapping);
  }
  return out;
}

ComputationGraph parse_graph(std::string_view text)
{
  return parse_graph_document(text).graph;
}

std::string serialize_graph(
  const ComputationGraph & graph, const std::optional<NodeMapping> & node_mapping)
{
  json doc;
  doc["nodes"] = json::array();
  for (const auto & n : graph.nodes()) {
    doc["nodes"].push_back({{"id", n}});
  }
  doc["topics"] = json::array();
  for (const auto & [id, info] : graph.topics()) {
    doc["topics"].push_back(
      {{"id", id}, {"message_size_bytes", info.message_size_bytes},
        {"publish_rate_hz", info.publish_rate_hz}});
  }
  doc["publishes"] = json::array();
  for (const auto & e : graph.pub_edges()) {
    doc["publishes"].push_back({{"node", e.node}, {"topic", e.topic}});
  }
  doc["subscribes"] = json::array();
  for (const auto & e : graph.sub_edges()) {
    doc["subscribes"].push_back({{"topic", e.topic}, {"node", e.node}});
  }
  if (node_mapping) {
    json m = json::object();
    for (const auto & [n, impl] : node_mapping->assignment()) {
      m[n] = std::string(to_string(impl));
    }
    doc["node_mapping"] = std::move(m);
  }
  return doc.dump(2) + "\n";
}

}  // namespace topomap
