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

#include "topomap/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <set>
#include <cstdio>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace topomap
{

using json = nlohmann::json;

namespace
{

constexpr const char * kTopic = "data";
constexpr const char * kPublisher = "pub";
constexpr const char * kSwSubscriber = "sw_sub";

std::string hw_subscriber_name(std::size_t i)
{
  return "hw_sub_" + std::to_string(i + 1);
}

std::string fixed(double v, int digits)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::vector<std::string> split(std::string_view line, char sep)
{
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

bool is_grid_document(std::string_view text)
{
  const json doc = json::parse(text.begin(), text.end(), nullptr, false);
  return doc.is_object() && doc.value("experiment", std::string()) == "pubsub_grid";
}

GridSpec parse_grid(std::string_view text)
{
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error & e) {
    throw GraphError(
            GraphError::Kind::Syntax,
            "grid: syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  GridSpec g;
  try {
    if (doc.contains("publishers")) {
      g.publishers.clear();
      for (const auto & p : doc["publishers"]) {
        g.publishers.push_back(node_impl_from_string(p.get<std::string>()));
      }
    }
    if (doc.contains("sizes")) {
      g.sizes = doc["sizes"].get<std::vector<std::uint64_t>>();
    }
    if (doc.contains("hw_subscriber_counts")) {
      g.hw_subscriber_counts = doc["hw_subscriber_counts"].get<std::vector<std::size_t>>();
    }
    g.repetitions = doc.value("repetitions", g.repetitions);
    g.period_us = doc.value("period_us", g.period_us);
    g.seed = doc.value("seed", g.seed);
  } catch (const json::exception & e) {
    throw GraphError(GraphError::Kind::Schema, std::string("grid: ") + e.what());
  }
  if (g.publishers.empty() || g.sizes.empty() || g.hw_subscriber_counts.empty()) {
    throw GraphError(GraphError::Kind::Schema, "grid: empty axis");
  }
  for (auto s : g.sizes) {
    if (s == 0) {
      throw GraphError(GraphError::Kind::InvalidValue, "grid: message size must be positive");
    }
  }
  if (g.repetitions == 0 || !(g.period_us > 0.0)) {
    throw GraphError(
            GraphError::Kind::InvalidValue, "grid: repetitions and period_us must be positive");
  }
  return g;
}

Scenario make_cell_scenario(
  const PubSubCell & cell, MappingPolicy policy, const PlatformModel & platform,
  std::size_t repetitions, double period_us, std::uint64_t seed)
{
  std::vector<NodeId> nodes{kPublisher, kSwSubscriber};
  std::vector<SubEdge> subs{{kTopic, kSwSubscriber}};
  std::map<NodeId, NodeImpl> placement{
    {kPublisher, cell.publisher}, {kSwSubscriber, NodeImpl::SW}};
  for (std::size_t i = 0; i < cell.hw_subscribers; ++i) {
    nodes.push_back(hw_subscriber_name(i));
    subs.push_back({kTopic, hw_subscriber_name(i)});
    placement[hw_subscriber_name(i)] = NodeImpl::HW;
  }
  const TopicInfo topic{kTopic, cell.size_bytes, 1.0e6 / period_us};

  Scenario s;
  s.graph = ComputationGraph::build(nodes, {topic}, {{kPublisher, kTopic}}, subs);
  s.node_mapping = NodeMapping(std::move(placement));
  s.comm_mapping = map_communication(
    s.graph, s.node_mapping, cost_params_from_platform(platform), policy).comm_mapping;
  s.workload.push_back(
    WorkloadEntry{kPublisher, kTopic, repetitions, cell.size_bytes, period_us, 0.0});
  s.seed = seed;
  return s;
}

CellTimes measure_cell(const Scenario & scenario, const PlatformModel & platform)
{
  const TransferStats stats = compute_stats(simulate(scenario, platform));
  CellTimes t;
  auto it = stats.per_topic.find(kTopic);
  if (it == stats.per_topic.end()) {
    return t;
  }
  t.t_hw_us = it->second.t_trans_hw_us.value_or(0.0);
  t.t_sw_us = it->second.t_trans_sw_us.value_or(0.0);
  return t;
}

CellComparison compare_cell(
  const PubSubCell & cell, const PlatformModel & platform, MappingPolicy policy_a,
  MappingPolicy policy_b, std::size_t repetitions, double period_us, std::uint64_t seed)
{
  CellComparison c;
  c.cell = cell;
  c.policy_a = policy_a;
  c.policy_b = policy_b;
  c.a = measure_cell(
    make_cell_scenario(cell, policy_a, platform, repetitions, period_us, seed), platform);
  c.b = measure_cell(
    make_cell_scenario(cell, policy_b, platform, repetitions, period_us, seed), platform);
  c.speedup_hw = c.b.t_hw_us > 0.0 ? c.a.t_hw_us / c.b.t_hw_us : 1.0;
  c.speedup_sw = c.b.t_sw_us > 0.0 ? c.a.t_sw_us / c.b.t_sw_us : 1.0;
  return c;
}

std::vector<CellComparison> compare_grid(
  const GridSpec & grid, const PlatformModel & platform, MappingPolicy policy_a,
  MappingPolicy policy_b, std::size_t threads)
{
  std::vector<PubSubCell> cells;
  for (NodeImpl p : grid.publishers) {
    for (auto size : grid.sizes) {
      for (auto k : grid.hw_subscriber_counts) {
        cells.push_back(PubSubCell{p, size, k});
      }
    }
  }
  std::vector<CellComparison> rows(cells.size());
  if (threads == 0) {
    threads = std::max(1u, std::thread::hardware_concurrency());
  }
  threads = std::min(threads, cells.size());

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
      for (std::size_t i = next++; i < cells.size(); i = next++) {
        try {
          rows[i] = compare_cell(
            cells[i], platform, policy_a, policy_b, grid.repetitions, grid.period_us, grid.seed);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) {
            failure = std::current_exception();
          }
        }
      }
    };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) {
    pool.emplace_back(worker);
  }
  worker();
  for (auto & t : pool) {
    t.join();
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
  return rows;
}

std::string comparison_csv(const std::vector<CellComparison> & rows)
{
  std::ostringstream out;
  out << "publisher,size_bytes,hw_subscribers,policy_a,policy_b,t_hw_a_us,t_hw_b_us,speedup_hw,"
    "t_sw_a_us,t_sw_b_us,speedup_sw\n";
  for (const auto & r : rows) {
    out << to_string(r.cell.publisher) << ',' << r.cell.size_bytes << ','
        << r.cell.hw_subscribers << ',' << to_string(r.policy_a) << ','
        << to_string(r.policy_b) << ',' << fixed(r.a.t_hw_us, 3) << ','
        << fixed(r.b.t_hw_us, 3) << ',' << fixed(r.speedup_hw, 6) << ','
        << fixed(r.a.t_sw_us, 3) << ',' << fixed(r.b.t_sw_us, 3) << ','
        << fixed(r.speedup_sw, 6) << '\n';
  }
  return out.str();
}

std::vector<CellComparison> parse_comparison_csv(std::string_view text)
{
  std::vector<CellComparison> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || split(line, ',').size() != 11 ||
    split(line, ',')[0] != "publisher")
  {
    throw GraphError(GraphError::Kind::Schema, "comparison CSV: unexpected header");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") {
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 11) {
      throw GraphError(
              GraphError::Kind::Schema,
              "comparison CSV: line " + std::to_string(line_no) + " has " +
              std::to_string(f.size()) + " fields");
    }
    try {
      CellComparison c;
      c.cell.publisher = node_impl_from_string(f[0]);
      c.cell.size_bytes = std::stoull(f[1]);
      c.cell.hw_subscribers = std::stoul(f[2]);
      c.policy_a = policy_from_string(f[3]);
      c.policy_b = policy_from_string(f[4]);
      c.a.t_hw_us = std::stod(f[5]);
      c.b.t_hw_us = std::stod(f[6]);
      c.speedup_hw = std::stod(f[7]);
      c.a.t_sw_us = std::stod(f[8]);
      c.b.t_sw_us = std::stod(f[9]);
      c.speedup_sw = std::stod(f[10]);
      rows.push_back(c);
    } catch (const std::logic_error & e) {
      throw GraphError(
              GraphError::Kind::InvalidValue,
              "comparison CSV: line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return rows;
}

std::map<std::string, std::string> report_series(const std::vector<CellComparison> & rows)
{
  std::map<std::string, std::string> files;
  for (NodeImpl pub : {NodeImpl::HW, NodeImpl::SW}) {
    for (bool hw_path : {true, false}) {
      std::set<std::size_t> ks;
      std::map<std::uint64_t, std::map<std::size_t, double>> table;
      for (const auto & r : rows) {
        if (r.cell.publisher != pub) {
          continue;
        }
        ks.insert(r.cell.hw_subscribers);
        table[r.cell.size_bytes][r.cell.hw_subscribers] = hw_path ? r.speedup_hw : r.speedup_sw;
      }
      std::ostringstream out;
      out << "size_bytes";
      for (auto k : ks) {
        out << ",speedup_k" << k;
      }
      out << '\n';
      for (const auto & [size, by_k] : table) {
        out << size;
        for (auto k : ks) {
          auto it = by_k.find(k);
          out << ',' << (it == by_k.end() ? std::string() : fixed(it->second, 6));
        }
        out << '\n';
      }
      const std::string name = std::string(pub == NodeImpl::HW ? "hw" : "sw") + "_to_" +
        (hw_path ? "hw" : "sw") + ".csv";
      files[name] = out.str();
    }
  }
  return files;
}

ChainComparison compare_chain(
  const Scenario & scenario, const PlatformModel & platform, MappingPolicy policy_a,
  MappingPolicy policy_b)
{
  if (scenario.chain.empty()) {
    throw SimulationError("scenario has no chain");
  }
  const CostModelParams params = cost_params_from_platform(platform);
  ChainComparison c;
  c.policy_a = policy_a;
  c.policy_b = policy_b;
  Scenario s = scenario;
  s.comm_mapping = map_communication(s.graph, s.node_mapping, params, policy_a).comm_mapping;
  c.a = run_chain_scenario(s, platform, s.chain);
  s.comm_mapping = map_communication(s.graph, s.node_mapping, params, policy_b).comm_mapping;
  c.b = run_chain_scenario(s, platform, s.chain);
  c.speedup = c.b.mean_us > 0.0 ? c.a.mean_us / c.b.mean_us : 1.0;
  return c;
}

std::string chain_comparison_csv(const ChainComparison & c)
{
  std::ostringstream out;
  out << "policy_a,policy_b,samples,mean_a_us,stddev_a_us,mean_b_us,stddev_b_us,speedup\n";
  out << to_string(c.policy_a) << ',' << to_string(c.policy_b) << ',' << c.a.samples_us.size()
      << ',' << fixed(c.a.mean_us, 3) << ',' << fixed(c.a.stddev_us, 3) << ','
      << fixed(c.b.mean_us, 3) << ',' << fixed(c.b.stddev_us, 3) << ','
      << fixed(c.speedup, 6) << '\n';
  return out.str();
}

std::vector<TopicComparison> compare_scenario(
  const Scenario & scenario, const PlatformModel & platform, MappingPolicy policy_a,
  MappingPolicy policy_b)
{
  const CostModelParams params = cost_params_from_platform(platform);
  Scenario sa = scenario;
  sa.comm_mapping = map_communication(sa.graph, sa.node_mapping, params, policy_a).comm_mapping;
  Scenario sb = scenario;
  sb.comm_mapping = map_communication(sb.graph, sb.node_mapping, params, policy_b).comm_mapping;
  const TransferStats a = compute_stats(simulate(sa, platform));
  const TransferStats b = compute_stats(simulate(sb, platform));

  std::vector<TopicComparison> rows;
  for (const auto & [topic, ta] : a.per_topic) {
    auto tb = b.per_topic.find(topic);
    if (tb == b.per_topic.end()) {
      throw SimulationError("mismatched scenario pair: topic \"" + topic + "\" missing in one run");
    }
    rows.push_back(
      TopicComparison{topic, sa.comm_mapping.at(topic), sb.comm_mapping.at(topic),
        ta.t_trans_hw_us, tb->second.t_trans_hw_us, ta.t_trans_sw_us, tb->second.t_trans_sw_us});
  }
  return rows;
}

std::string topic_comparison_csv(const std::vector<TopicComparison> & rows)
{
  auto cell = [](const std::optional<double> & v) {return v ? fixed(*v, 3) : std::string();};
  auto ratio = [](const std::optional<double> & a, const std::optional<double> & b) {
      return a && b && *b > 0.0 ? fixed(*a / *b, 6) : std::string();
    };
  std::ostringstream out;
  out << "topic,impl_a,impl_b,t_hw_a_us,t_hw_b_us,speedup_hw,t_sw_a_us,t_sw_b_us,speedup_sw\n";
  for (const auto & r : rows) {
    out << r.topic << ',' << to_string(r.impl_a) << ',' << to_string(r.impl_b) << ','
        << cell(r.t_hw_a_us) << ',' << cell(r.t_hw_b_us) << ',' << ratio(r.t_hw_a_us, r.t_hw_b_us)
        << ',' << cell(r.t_sw_a_us) << ',' << cell(r.t_sw_b_us) << ','
        << ratio(r.t_sw_a_us, r.t_sw_b_us) << '\n';
  }
  return out.str();
}

}  // namespace topomap
