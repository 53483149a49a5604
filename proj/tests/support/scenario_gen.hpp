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

#ifndef SUPPORT__SCENARIO_GEN_HPP_
#define SUPPORT__SCENARIO_GEN_HPP_

#include <random>
#include <set>
#include <string>
#include <vector>

#include "topomap/mapping.hpp"
#include "topomap/platform.hpp"

namespace gen
{

using namespace topomap;

struct GraphShape
{
  std::size_t min_nodes = 2;
  std::size_t max_nodes = 8;
  std::size_t min_topics = 1;
  std::size_t max_topics = 5;
  double edge_probability = 0.35;
};

inline ComputationGraph random_graph(std::mt19937_64 & rng, const GraphShape & shape = {})
{
  std::uniform_int_distribution<std::size_t> n_nodes(shape.min_nodes, shape.max_nodes);
  std::uniform_int_distribution<std::size_t> n_topics(shape.min_topics, shape.max_topics);
  std::uniform_int_distribution<std::uint64_t> size(1000, 2000000);
  std::bernoulli_distribution edge(shape.edge_probability);
  const std::size_t nn = n_nodes(rng);
  const std::size_t nt = n_topics(rng);
  std::vector<NodeId> nodes;
  for (std::size_t i = 0; i < nn; ++i) {
    nodes.push_back("n" + std::to_string(i));
  }
  std::vector<TopicInfo> topics;
  std::vector<PubEdge> pubs;
  std::vector<SubEdge> subs;
  for (std::size_t t = 0; t < nt; ++t) {
    const TopicId id = "t" + std::to_string(t);
    topics.push_back(TopicInfo{id, size(rng), 10.0});
    bool has_pub = false;
    for (const auto & n : nodes) {
      if (edge(rng)) {
        pubs.push_back({n, id});
        has_pub = true;
      }
      if (edge(rng)) {
        subs.push_back({id, n});
      }
    }
    if (!has_pub) {
      pubs.push_back({nodes[rng() % nodes.size()], id});
    }
  }
  return ComputationGraph::build(nodes, topics, pubs, subs);
}

inline NodeMapping random_node_mapping(std::mt19937_64 & rng, const ComputationGraph & g)
{
  std::bernoulli_distribution hw(0.5);
  std::set<NodeId> hw_nodes;
  for (const auto & n : g.nodes()) {
    if (hw(rng)) {
      hw_nodes.insert(n);
    }
  }
  return NodeMapping::with_hardware(g, hw_nodes);
}

/// Random graph and node mapping mapped with the multi-hw-sub policy,
/// plus a workload of 1-3 messages per publish edge with overlapping
/// release times so gateways see concurrent traffic.
inline Scenario random_scenario(std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  Scenario s;
  s.graph = random_graph(rng);
  s.node_mapping = random_node_mapping(rng, s.graph);
  s.comm_mapping =
    map_communication(s.graph, s.node_mapping, CostModelParams{}, MappingPolicy::MultiHwSub)
    .comm_mapping;
  std::uniform_int_distribution<std::uint64_t> count(1, 3);
  std::uniform_real_distribution<double> start(0.0, 2000.0);
  std::uniform_real_distribution<double> period(100.0, 3000.0);
  for (const auto & e : s.graph.pub_edges()) {
    s.workload.push_back(
      WorkloadEntry{e.node, e.topic, count(rng), s.graph.topic(e.topic).message_size_bytes,
        period(rng), start(rng)});
  }
  s.seed = seed;
  return s;
}

/// Same scenario with every gateway topic turned back into an SMT.
inline Scenario smt_variant(const Scenario & s)
{
  Scenario out = s;
  for (const auto & t : s.comm_mapping.topics_with(TopicImpl::GW)) {
    out.comm_mapping.set(t, TopicImpl::SMT);
  }
  return out;
}

}  // namespace gen

#endif  // SUPPORT__SCENARIO_GEN_HPP_
