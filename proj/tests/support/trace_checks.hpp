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

#ifndef SUPPORT__TRACE_CHECKS_HPP_
#define SUPPORT__TRACE_CHECKS_HPP_

// Trace properties recomputed from raw events, independent of
// compute_stats().

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "topomap/sim.hpp"

namespace checks
{

using topomap::SimTrace;
using topomap::TraceKind;

inline std::vector<std::string> timestamp_violations(const SimTrace & t)
{
  std::vector<std::string> out;
  for (std::size_t i = 1; i < t.events.size(); ++i) {
    if (t.events[i].time_ns < t.events[i - 1].time_ns) {
      out.push_back("event " + std::to_string(i) + " goes back in time");
    }
  }
  return out;
}

/// Every published message reaches every subscriber of its topic exactly
/// once, and nothing else is delivered.
inline std::vector<std::string> conservation_violations(const SimTrace & t)
{
  std::map<std::pair<std::uint64_t, std::string>, int> seen;
  std::map<std::uint64_t, std::string> topic_of;
  for (const auto & m : t.messages) {
    topic_of[m.id] = m.topic;
  }
  std::vector<std::string> out;
  for (const auto & e : t.events) {
    if (e.kind == TraceKind::HMT_DELIVER || e.kind == TraceKind::SMT_DELIVER) {
      if (!topic_of.count(e.message_id)) {
        out.push_back("delivery of unpublished message " + std::to_string(e.message_id));
      }
      ++seen[{e.message_id, e.endpoint}];
    }
  }
  std::size_t expected = 0;
  for (const auto & m : t.messages) {
    for (const auto & [node, impl] : t.subscribers.at(m.topic)) {
      (void)impl;
      ++expected;
      const int n = seen[{m.id, node}];
      if (n != 1) {
        out.push_back(
          "message " + std::to_string(m.id) + " reached " + node + " " + std::to_string(n) +
          " times");
      }
    }
  }
  std::size_t delivered = 0;
  for (const auto & [k, n] : seen) {
    (void)k;
    delivered += static_cast<std::size_t>(n);
  }
  if (delivered != expected) {
    out.push_back(
      "delivered " + std::to_string(delivered) + " copies, expected " + std::to_string(expected));
  }
  return out;
}

inline std::map<std::uint64_t, std::size_t> memif_transfers_per_message(const SimTrace & t)
{
  std::map<std::uint64_t, std::size_t> out;
  for (const auto & m : t.messages) {
    out[m.id] = 0;
  }
  for (const auto & e : t.events) {
    if (e.kind == TraceKind::MEMIF_XFER_START) {
      ++out[e.message_id];
    }
  }
  return out;
}

struct Interval
{
  std::int64_t start_ns;
  std::int64_t end_ns;
  std::uint64_t bytes;
};

/// Pairs MEMIF start/end events by (message, endpoint) in FIFO order.
inline std::vector<Interval> memif_intervals(const SimTrace & t)
{
  std::map<std::pair<std::uint64_t, std::string>, std::vector<std::int64_t>> open;
  std::vector<Interval> out;
  for (const auto & e : t.events) {
    if (e.kind == TraceKind::MEMIF_XFER_START) {
      open[{e.message_id, e.endpoint}].push_back(e.time_ns);
    } else if (e.kind == TraceKind::MEMIF_XFER_END) {
      auto & q = open[{e.message_id, e.endpoint}];
      out.push_back(Interval{q.front(), e.time_ns, e.bytes});
      q.erase(q.begin());
    }
  }
  return out;
}

/// Largest ratio of bytes moved by transfers lying inside a window to the
/// bandwidth-limited capacity of that window, over all windows spanned by a
/// transfer start and a transfer end. Must not exceed 1 (plus rounding).
inline double max_memif_utilization(const SimTrace & t, double bandwidth_bytes_per_s)
{
  auto iv = memif_intervals(t);
  std::sort(iv.begin(), iv.end(), [](const Interval & a, const Interval & b) {
      return a.end_ns < b.end_ns;
    });
  std::set<std::int64_t> starts;
  for (const auto & i : iv) {
    starts.insert(i.start_ns);
  }
  double worst = 0.0;
  for (std::int64_t a : starts) {
    double bytes = 0.0;
    for (const auto & i : iv) {
      if (i.start_ns < a) {
        continue;
      }
      bytes += static_cast<double>(i.bytes);
      const double window_s = static_cast<double>(i.end_ns - a) * 1e-9;
      const double ratio = window_s > 0.0 ?
        bytes / (bandwidth_bytes_per_s * window_s) :
        (bytes > 0.0 ? 1e300 : 0.0);
      worst = std::max(worst, ratio);
    }
  }
  return worst;
}

/// Gateway forwarding actions per message id; each message is forwarded by
/// at most one TransferToHmt or PublishSmt.
inline std::map<std::uint64_t, std::size_t> forwards_per_message(const SimTrace & t)
{
  std::map<std::uint64_t, std::size_t> out;
  for (const auto & e : t.events) {
    if (e.kind == TraceKind::GW_ACTION &&
      (e.detail == "TransferToHmt" || e.detail == "PublishSmt"))
    {
      ++out[e.message_id];
    }
  }
  return out;
}

}  // namespace checks

#endif  // SUPPORT__TRACE_CHECKS_HPP_
