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

#ifndef TOPOMAP__EXPERIMENTS_HPP_
#define TOPOMAP__EXPERIMENTS_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "topomap/graph.hpp"
#include "topomap/mapping.hpp"
#include "topomap/platform.hpp"
#include "topomap/sim.hpp"

namespace topomap
{

/// One publisher, `hw_subscribers` hardware subscribers and one software
/// subscriber on a single topic.
struct PubSubCell
{
  NodeImpl publisher = NodeImpl::HW;
  std::uint64_t size_bytes = 10000;
  std::size_t hw_subscribers = 2;
};

struct GridSpec
{
  std::vector<NodeImpl> publishers{NodeImpl::HW, NodeImpl::SW};
  std::vector<std::uint64_t> sizes{10000, 100000, 1000000, 10000000};
  std::vector<std::size_t> hw_subscriber_counts{2, 4, 8};
  std::size_t repetitions = 500;
  /// Spacing of repetitions; large enough that messages never overlap.
  double period_us = 1.0e7;
  std::uint64_t seed = 42;
};

/// True when the document declares `"experiment": "pubsub_grid"`.
bool is_grid_document(std::string_view text);
GridSpec parse_grid(std::string_view text);

/// Builds the cell's graph and workload. The comm mapping follows `policy`.
Scenario make_cell_scenario(
  const PubSubCell & cell, MappingPolicy policy, const PlatformModel & platform,
  std::size_t repetitions, double period_us, std::uint64_t seed);

struct CellTimes
{
  /// Mean of the slowest hardware subscriber's transmission time.
  double t_hw_us = 0.0;
  /// Mean transmission time of the software subscriber.
  double t_sw_us = 0.0;
};

CellTimes measure_cell(const Scenario & scenario, const PlatformModel & platform);

struct CellComparison
{
  PubSubCell cell;
  MappingPolicy policy_a = MappingPolicy::AlwaysSmt;
  MappingPolicy policy_b = MappingPolicy::MultiHwSub;
  CellTimes a;
  CellTimes b;
  /// a / b, so values above 1 mean policy b is faster.
  double speedup_hw = 1.0;
  double speedup_sw = 1.0;
};

CellComparison compare_cell(
  const PubSubCell & cell, const PlatformModel & platform, MappingPolicy policy_a,
  MappingPolicy policy_b, std::size_t repetitions, double period_us, std::uint64_t seed);

/// Runs every cell of the grid, fanned out over `threads` workers. Rows come
/// back in grid order: publisher, size, subscriber count.
std::vector<CellComparison> compare_grid(
  const GridSpec & grid, const PlatformModel & platform, MappingPolicy policy_a,
  MappingPolicy policy_b, std::size_t threads = 0);

std::string comparison_csv(const std::vector<CellComparison> & rows);

/// Parses the output of comparison_csv.
std::vector<CellComparison> parse_comparison_csv(std::string_view text);

/// Plot-ready series: file name -> CSV with size_bytes on x and one speedup
/// column per subscriber count. Produces hw_to_hw, hw_to_sw, sw_to_hw and
/// sw_to_sw.
std::map<std::string, std::string> report_series(const std::vector<CellComparison> & rows);

struct ChainComparison
{
  MappingPolicy policy_a = MappingPolicy::AlwaysSmt;
  MappingPolicy policy_b = MappingPolicy::MultiHwSub;
  ChainResult a;
  ChainResult b;
  double speedup = 1.0;
};

/// Maps the scenario under both policies and runs its chain.
ChainComparison compare_chain(
  const Scenario & scenario, const PlatformModel & platform, MappingPolicy policy_a,
  MappingPolicy policy_b);

std::string chain_comparison_csv(const ChainComparison & c);

/// Per-topic comparison of an arbitrary scenario mapped under two policies.
struct TopicComparison
{
  TopicId topic;
  TopicImpl impl_a = TopicImpl::SMT;
  TopicImpl impl_b = TopicImpl::SMT;
  std::optional<double> t_hw_a_us;
  std::optional<double> t_hw_b_us;
  std::optional<double> t_sw_a_us;
  std::optional<double> t_sw_b_us;
};

std::vector<TopicComparison> compare_scenario(
  const Scenario & scenario, const PlatformModel & platform, MappingPolicy policy_a,
  MappingPolicy policy_b);

std::string topic_comparison_csv(const std::vector<TopicComparison> & rows);

}  // namespace topomap

#endif  // TOPOMAP__EXPERIMENTS_HPP_
