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

#include "topomap/mapping.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace topomap
{

using json = nlohmann::json;

std::string_view to_string(TopicClass c)
{
  switch (c) {
    case TopicClass::ALL_SW: return "ALL_SW";
    case TopicClass::ALL_HW: return "ALL_HW";
    case TopicClass::MIXED: return "MIXED";
  }
  return "?";
}

std::string_view to_string(MappingRule r)
{
  switch (r) {
    case MappingRule::ALL_SW: return "ALL_SW";
    case MappingRule::ALL_HW: return "ALL_HW";
    case MappingRule::MIXED_COST: return "MIXED_COST";
  }
  return "?";
}

std::string_view to_string(MappingPolicy p)
{
  switch (p) {
    case MappingPolicy::Cost: return "cost";
    case MappingPolicy::MultiHwSub: return "multi-hw-sub";
    case MappingPolicy::AlwaysSmt: return "smt";
  }
  return "?";
}

MappingPolicy policy_from_string(std::string_view text)
{
  if (text == "cost") {
    return MappingPolicy::Cost;
  }
  if (text == "multi-hw-sub") {
    return MappingPolicy::MultiHwSub;
  }
  if (text == "smt") {
    return MappingPolicy::AlwaysSmt;
  }
  throw MappingError(
    "unknown policy \"" + std::string(text) + "\" (expected cost, multi-hw-sub or smt)");
}

void CostModelParams::validate() const
{
  auto positive = [](double v, const char * name) {
      if (!(v > 0.0)) {
        throw MappingError(std::string("cost model: ") + name + " must be positive");
      }
    };
  positive(memif_bandwidth_bytes_per_s, "memif_bandwidth_bytes_per_s");
  positive(hmt_bandwidth_bytes_per_s, "hmt_bandwidth_bytes_per_s");
  positive(gateway_fixed_overhead_us, "gateway_fixed_overhead_us");
  positive(delegate_roundtrip_us, "delegate_roundtrip_us");
  positive(sw_dds_latency.intercept_us, "sw_dds_latency.intercept_us");
  positive(sw_dds_latency.us_per_byte, "sw_dds_latency.us_per_byte");
  if (hmt_bandwidth_bytes_per_s < memif_bandwidth_bytes_per_s) {
    throw MappingError("cost model: hmt bandwidth must not be below memif bandwidth");
  }
}

namespace
{

struct EndpointCounts
{
  std::size_t hw_pub = 0;
  std::size_t sw_pub = 0;
  std::size_t hw_sub = 0;
  std::size_t sw_sub = 0;
};

EndpointCounts count_endpoints(
  const ComputationGraph & graph, const NodeMapping & nm, const TopicId & topic)
{
  EndpointCounts c;
  for (const auto & e : pub_edges_of(graph, topic)) {
    (nm.is_hw(e.node) ? c.hw_pub : c.sw_pub)++;
  }
  for (const auto & e : sub_edges_of(graph, topic)) {
    (nm.is_hw(e.node) ? c.hw_sub : c.sw_sub)++;
  }
  return c;
}

void require_mixed(
  const ComputationGraph & graph, const NodeMapping & nm, const TopicId & topic)
{
  if (classify_topic(graph, nm, topic) != TopicClass::MIXED) {
    throw MappingError("cost estimate requested for non-MIXED topic \"" + topic + "\"");
  }
}

constexpr double kUsPerSecond = 1e6;

}  // namespace

TopicClass classify_topic(
  const ComputationGraph & graph, const NodeMapping & nm, const TopicId & topic)
{
  const EndpointCounts c = count_endpoints(graph, nm, topic);
  // A topic without endpoints satisfies both conditions vacuously; software
  // is the default mapping, so it classifies as ALL_SW.
  if (c.hw_pub == 0 && c.hw_sub == 0) {
    return TopicClass::ALL_SW;
  }
  if (c.sw_pub == 0 && c.sw_sub == 0) {
    return TopicClass::ALL_HW;
  }
  return TopicClass::MIXED;
}

double smt_cost_us(double size_bytes, std::size_t hw_subscribers, const CostModelParams & params)
{
  return params.delegate_roundtrip_us +
         size_bytes * static_cast<double>(hw_subscribers) /
         params.memif_bandwidth_bytes_per_s * kUsPerSecond +
         params.sw_dds_latency.at(size_bytes);
}

double gw_cost_us(double size_bytes, const CostModelParams & params)
{
  return params.gateway_fixed_overhead_us +
         size_bytes / params.memif_bandwidth_bytes_per_s * kUsPerSecond +
         size_bytes / params.hmt_bandwidth_bytes_per_s * kUsPerSecond +
         params.sw_dds_latency.at(size_bytes);
}

double estimate_smt_cost_us(
  const TopicId & topic, const ComputationGraph & graph, const NodeMapping & nm,
  const CostModelParams & params)
{
  require_mixed(graph, nm, topic);
  return smt_cost_us(
    static_cast<double>(graph.topic(topic).message_size_bytes),
    count_endpoints(graph, nm, topic).hw_sub, params);
}

double estimate_gw_cost_us(
  const TopicId & topic, const ComputationGraph & graph, const NodeMapping & nm,
  const CostModelParams & params)
{
  require_mixed(graph, nm, topic);
  return gw_cost_us(static_cast<double>(graph.topic(topic).message_size_bytes), params);
}

MappingResult map_communication(
  const ComputationGraph & graph, const NodeMapping & nm, const CostModelParams & params,
  MappingPolicy policy)
{
  nm.validate(graph);
  params.validate();

  MappingResult result;
  for (const auto & [topic, info] : graph.topics()) {
    (void)info;
    const EndpointCounts c = count_endpoints(graph, nm, topic);
    MappingRationale r;
    r.topic = topic;
    r.hw_subscriber_count = c.hw_sub;
    r.hw_publisher_count = c.hw_pub;

    switch (classify_topic(graph, nm, topic)) {
      case TopicClass::ALL_SW:
        r.rule = MappingRule::ALL_SW;
        r.chosen = TopicImpl::SMT;
        break;
      case TopicClass::ALL_HW:
        r.rule = MappingRule::ALL_HW;
        r.chosen = TopicImpl::HMT;
        break;
      case TopicClass::MIXED: {
          r.rule = MappingRule::MIXED_COST;
          const double smt = estimate_smt_cost_us(topic, graph, nm, params);
          const double gw = estimate_gw_cost_us(topic, graph, nm, params);
          r.estimated_cost_smt_us = smt;
          r.estimated_cost_gw_us = gw;
          switch (policy) {
            case MappingPolicy::Cost:
              r.chosen = gw < smt ? TopicImpl::GW : TopicImpl::SMT;
              break;
            case MappingPolicy::MultiHwSub:
              r.chosen = c.hw_sub >= 2 ? TopicImpl::GW : TopicImpl::SMT;
              break;
            case MappingPolicy::AlwaysSmt:
              r.chosen = TopicImpl::SMT;
              break;
          }
          break;
        }
    }
    result.comm_mapping.set(topic, r.chosen);
    result.rationales.push_back(std::move(r));
  }
  return result;
}

std::size_t count_boundary_crossings(
  const ComputationGraph & graph, const NodeMapping & nm, const CommMapping & cm)
{
  cm.validate(graph);
  std::size_t crossings = 0;
  auto count_edge = [&](const TopicId & topic, const NodeId & node) {
      const bool hw = nm.is_hw(node);
      switch (cm.at(topic)) {
        case TopicImpl::SMT:
          crossings += hw ? 1 : 0;
          break;
        case TopicImpl::HMT:
          if (!hw) {
            throw MappingError(
                    "topic \"" + topic + "\" is hardware-mapped but node \"" + node +
                    "\" is in software");
          }
          break;
        case TopicImpl::GW:
          crossings += hw ? 0 : 1;
          break;
      }
    };
  for (const auto & e : graph.pub_edges()) {
    count_edge(e.topic, e.node);
  }
  for (const auto & e : graph.sub_edges()) {
    count_edge(e.topic, e.node);
  }
  return crossings;
}

std::string mapping_report_json(const MappingResult & result, std::size_t boundary_crossings)
{
  json doc;
  json cm = json::object();
  for (const auto & [t, impl] : result.comm_mapping.assignment()) {
    cm[t] = std::string(to_string(impl));
  }
  doc["comm_mapping"] = std::move(cm);
  doc["rationales"] = json::array();
  for (const auto & r : result.rationales) {
    json j{
      {"topic", r.topic},
      {"chosen", std::string(to_string(r.chosen))},
      {"rule", std::string(to_string(r.rule))},
      {"hw_subscriber_count", r.hw_subscriber_count},
      {"hw_publisher_count", r.hw_publisher_count},
    };
    if (r.estimated_cost_smt_us) {
      j["estimated_cost_smt_us"] = *r.estimated_cost_smt_us;
    }
    if (r.estimated_cost_gw_us) {
      j["estimated_cost_gw_us"] = *r.estimated_cost_gw_us;
    }
    doc["rationales"].push_back(std::move(j));
  }
  doc["boundary_crossings"] = boundary_crossings;
  return doc.dump(2) + "\n";
}

std::string mapping_report_table(const MappingResult & result, std::size_t boundary_crossings)
{
  std::ostringstream out;
  char line[160];
  std::snprintf(
    line, sizeof(line), "%-24s %-4s %-11s %6s %6s %14s %14s\n", "topic", "impl", "rule",
    "hw_pub", "hw_sub", "smt_cost_us", "gw_cost_us");
  out << line;
  for (const auto & r : result.rationales) {
    char smt[32] = "-";
    char gw[32] = "-";
    if (r.estimated_cost_smt_us) {
      std::snprintf(smt, sizeof(smt), "%.3f", *r.estimated_cost_smt_us);
    }
    if (r.estimated_cost_gw_us) {
      std::snprintf(gw, sizeof(gw), "%.3f", *r.estimated_cost_gw_us);
    }
    std::snprintf(
      line, sizeof(line), "%-24s %-4s %-11s %6zu %6zu %14s %14s\n", r.topic.c_str(),
      std::string(to_string(r.chosen)).c_str(), std::string(to_string(r.rule)).c_str(),
      r.hw_publisher_count, r.hw_subscriber_count, smt, gw);
    out << line;
  }
  out << "boundary crossings: " << boundary_crossings << "\n";
  return out.str();
}

}  // namespace topomap
