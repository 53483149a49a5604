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

#include "topomap/platform.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include "json.hpp"

namespace topomap
{

using json = nlohmann::json;

void PlatformModel::validate() const
{
  auto positive = [](double v, const char * name) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw SimulationError(std::string("platform: ") + name + " must be positive");
      }
    };
  positive(memif_bandwidth_bytes_per_s, "memif_bandwidth_bytes_per_s");
  positive(hmt_bandwidth_bytes_per_s, "hmt_bandwidth_bytes_per_s");
  positive(hmt_latency_us, "hmt_latency_us");
  positive(osif_roundtrip_us, "osif_roundtrip_us");
  positive(delegate_publish_us, "delegate_publish_us");
  positive(sw_dds_latency.intercept_us, "sw_dds_latency.intercept_us");
  positive(sw_dds_latency.us_per_byte, "sw_dds_latency.us_per_byte");
  positive(sw_copy_bandwidth_bytes_per_s, "sw_copy_bandwidth_bytes_per_s");
  if (!(jitter_fraction >= 0.0 && jitter_fraction < 1.0)) {
    throw SimulationError("platform: jitter_fraction must lie in [0, 1)");
  }
}

namespace
{

double number_field(const json & doc, const char * key)
{
  auto it = doc.find(key);
  if (it == doc.end() || !it->is_number()) {
    throw SimulationError(std::string("platform: missing numeric field \"") + key + "\"");
  }
  return it->get<double>();
}

}  // namespace

PlatformModel platform_from_json(std::string_view text)
{
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error & e) {
    throw SimulationError(
            "platform: syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) {
    throw SimulationError("platform: document must be a JSON object");
  }
  PlatformModel m;
  m.memif_bandwidth_bytes_per_s = number_field(doc, "memif_bandwidth_bytes_per_s");
  m.hmt_bandwidth_bytes_per_s = number_field(doc, "hmt_bandwidth_bytes_per_s");
  m.hmt_latency_us = number_field(doc, "hmt_latency_us");
  m.osif_roundtrip_us = number_field(doc, "osif_roundtrip_us");
  m.delegate_publish_us = number_field(doc, "delegate_publish_us");
  auto dds = doc.find("sw_dds_latency");
  if (dds == doc.end() || !dds->is_object()) {
    throw SimulationError("platform: missing object field \"sw_dds_latency\"");
  }
  m.sw_dds_latency.intercept_us = number_field(*dds, "intercept_us");
  m.sw_dds_latency.us_per_byte = number_field(*dds, "us_per_byte");
  m.sw_copy_bandwidth_bytes_per_s = number_field(doc, "sw_copy_bandwidth_bytes_per_s");
  if (doc.contains("jitter_fraction")) {
    m.jitter_fraction = number_field(doc, "jitter_fraction");
  }
  m.validate();
  return m;
}

std::string platform_to_json(const PlatformModel & m)
{
  json doc{
    {"memif_bandwidth_bytes_per_s", m.memif_bandwidth_bytes_per_s},
    {"hmt_bandwidth_bytes_per_s", m.hmt_bandwidth_bytes_per_s},
    {"hmt_latency_us", m.hmt_latency_us},
    {"osif_roundtrip_us", m.osif_roundtrip_us},
    {"delegate_publish_us", m.delegate_publish_us},
    {"sw_dds_latency", {{"intercept_us", m.sw_dds_latency.intercept_us},
      {"us_per_byte", m.sw_dds_latency.us_per_byte}}},
    {"sw_copy_bandwidth_bytes_per_s", m.sw_copy_bandwidth_bytes_per_s},
    {"jitter_fraction", m.jitter_fraction},
  };
  return doc.dump(2) + "\n";
}

CostModelParams cost_params_from_platform(const PlatformModel & m)
{
  CostModelParams p;
  p.memif_bandwidth_bytes_per_s = m.memif_bandwidth_bytes_per_s;
  p.hmt_bandwidth_bytes_per_s = m.hmt_bandwidth_bytes_per_s;
  p.delegate_roundtrip_us = m.osif_roundtrip_us + m.delegate_publish_us;
  p.gateway_fixed_overhead_us = m.hmt_latency_us + m.osif_roundtrip_us + m.delegate_publish_us;
  p.sw_dds_latency = m.sw_dds_latency;
  return p;
}

double Scenario::compute_of(const NodeId & node) const
{
  auto it = compute_us.find(node);
  return it == compute_us.end() ? 0.0 : it->second;
}

void Scenario::validate() const
{
  node_mapping.validate(graph);
  comm_mapping.validate(graph);
  for (const auto & [topic, impl] : comm_mapping.assignment()) {
    if (impl != TopicImpl::HMT) {
      continue;
    }
    for (const auto & n : publishers_of(graph, topic)) {
      if (!node_mapping.is_hw(n)) {
        throw SimulationError(
                "inconsistent mapping: HMT topic \"" + topic + "\" has software publisher \"" +
                n + "\"");
      }
    }
    for (const auto & n : subscribers_of(graph, topic)) {
      if (!node_mapping.is_hw(n)) {
        throw SimulationError(
                "inconsistent mapping: HMT topic \"" + topic + "\" has software subscriber \"" +
                n + "\"");
      }
    }
  }
  for (const auto & w : workload) {
    if (graph.pub_edges().count(PubEdge{w.publisher, w.topic}) == 0) {
      throw SimulationError(
              "workload entry " + w.publisher + " -> " + w.topic + " has no publish edge");
    }
    if (w.size_bytes == 0) {
      throw SimulationError("workload entry " + w.publisher + " -> " + w.topic + ": size is 0");
    }
    if (w.count > 1 && !(w.period_us > 0.0)) {
      throw SimulationError(
              "workload entry " + w.publisher + " -> " + w.topic + ": period must be positive");
    }
  }
  for (const auto & [node, us] : compute_us) {
    if (!graph.has_node(node)) {
      throw SimulationError("compute_us references undeclared node \"" + node + "\"");
    }
    if (!(us >= 0.0)) {
      throw SimulationError("compute_us for \"" + node + "\" must be non-negative");
    }
  }
  for (const auto & node : chain) {
    if (!graph.has_node(node)) {
      throw SimulationError("chain references undeclared node \"" + node + "\"");
    }
  }
}

namespace
{

ScenarioDocument parse_scenario_impl(const json & doc, const std::filesystem::path & base_dir)
{
  if (!doc.is_object() || !doc.contains("graph")) {
    throw GraphError(GraphError::Kind::Schema, "scenario: missing field \"graph\"");
  }

  GraphDocument gdoc;
  const json & g = doc["graph"];
  if (g.is_string()) {
    gdoc = parse_graph_document(read_text_file(base_dir / g.get<std::string>()));
  } else {
    gdoc = parse_graph_document(g.dump());
  }

  ScenarioDocument out;
  Scenario & s = out.scenario;
  s.graph = std::move(gdoc.graph);

  if (auto it = doc.find("node_mapping"); it != doc.end()) {
    std::map<NodeId, NodeImpl> assignment;
    for (const auto & [node, impl] : it->items()) {
      assignment[node] = node_impl_from_string(impl.get<std::string>());
    }
    s.node_mapping = NodeMapping(std::move(assignment));
  } else if (gdoc.node_mapping) {
    s.node_mapping = *gdoc.node_mapping;
  } else {
    throw GraphError(GraphError::Kind::Schema, "scenario: missing field \"node_mapping\"");
  }

  if (auto it = doc.find("comm_mapping"); it != doc.end()) {
    std::map<TopicId, TopicImpl> assignment;
    for (const auto & [topic, impl] : it->items()) {
      assignment[topic] = topic_impl_from_string(impl.get<std::string>());
    }
    s.comm_mapping = CommMapping(std::move(assignment));
    out.has_comm_mapping = true;
  }

  if (auto it = doc.find("workload"); it != doc.end()) {
    for (const auto & w : *it) {
      WorkloadEntry e;
      e.publisher = w.at("publisher").get<std::string>();
      e.topic = w.at("topic").get<std::string>();
      e.count = w.value("count", std::uint64_t{1});
      e.size_bytes = w.contains("size_bytes") ?
        w["size_bytes"].get<std::uint64_t>() :
        (s.graph.has_topic(e.topic) ? s.graph.topic(e.topic).message_size_bytes : 0);
      e.period_us = w.value("period_us", 1.0e6);
      e.start_us = w.value("start_us", 0.0);
      s.workload.push_back(std::move(e));
    }
  }
  s.seed = doc.value("seed", std::uint64_t{42});
  if (auto it = doc.find("compute_us"); it != doc.end()) {
    for (const auto & [node, us] : it->items()) {
      s.compute_us[node] = us.get<double>();
    }
  }
  if (auto it = doc.find("chain"); it != doc.end()) {
    s.chain = it->get<std::vector<NodeId>>();
  }
  return out;
}

}  // namespace

ScenarioDocument parse_scenario(std::string_view text, const std::filesystem::path & base_dir)
{
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error & e) {
    throw GraphError(
            GraphError::Kind::Syntax,
            "scenario: syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  try {
    return parse_scenario_impl(doc, base_dir);
  } catch (const json::exception & e) {
    throw GraphError(GraphError::Kind::Schema, std::string("scenario: ") + e.what());
  }
}

std::string read_text_file(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open \"" + path.string() + "\" for reading");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path & path, std::string_view content)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open \"" + path.string() + "\" for writing");
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

}  // namespace topomap
