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

#include "topomap/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <functional>
#include <memory>
#include <queue>
#include <random>
#include <sstream>
#include <utility>

#include "topomap/gateway.hpp"

namespace topomap
{

std::string_view to_string(TraceKind kind)
{
  switch (kind) {
    case TraceKind::PUBLISH: return "PUBLISH";
    case TraceKind::MEMIF_XFER_START: return "MEMIF_XFER_START";
    case TraceKind::MEMIF_XFER_END: return "MEMIF_XFER_END";
    case TraceKind::HMT_DELIVER: return "HMT_DELIVER";
    case TraceKind::SMT_DELIVER: return "SMT_DELIVER";
    case TraceKind::GW_ACTION: return "GW_ACTION";
  }
  return "?";
}

std::vector<TopicId> chain_topics(const ComputationGraph & graph, const std::vector<NodeId> & chain)
{
  std::vector<TopicId> out;
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    std::optional<TopicId> link;
    for (const auto & e : graph.pub_edges()) {
      if (e.node == chain[i] && graph.sub_edges().count(SubEdge{e.topic, chain[i + 1]})) {
        link = e.topic;
        break;
      }
    }
    if (!link) {
      throw SimulationError(
              "disconnected chain: no topic links \"" + chain[i] + "\" to \"" + chain[i + 1] +
              "\"");
    }
    out.push_back(*link);
  }
  return out;
}

namespace
{

using Ns = std::int64_t;
constexpr double kNsPerUs = 1e3;
constexpr double kNsPerSecond = 1e9;
constexpr double kUsPerSecond = 1e6;

Ns to_ns(double us)
{
  return static_cast<Ns>(std::llround(us * kNsPerUs));
}

struct SimMessage
{
  std::uint64_t id = 0;
  TopicId topic;
  std::string publisher_id;
  std::uint64_t seq = 0;
  std::uint64_t size = 0;
  std::optional<std::uint64_t> chain_token;
};

std::string own_smt_id(const TopicId & topic) {return "gw:" + topic + ":smt";}
std::string own_hmt_id(const TopicId & topic) {return "gw:" + topic + ":hmt";}
std::string gateway_endpoint(const TopicId & topic) {return "gw:" + topic;}

class Simulator
{
public:
  Simulator(const Scenario & scenario, const PlatformModel & platform, bool chain_mode)
  : scenario_(scenario),
    platform_(platform),
    rng_(scenario.seed)
  {
    platform_.validate();
    scenario_.validate();
    const auto & g = scenario_.graph;
    for (const auto & [topic, info] : g.topics()) {
      (void)info;
      auto & subs = trace_.subscribers[topic];
      for (const auto & n : subscribers_of(g, topic)) {
        subs.emplace_back(n, scenario_.node_mapping.at(n));
      }
      const TopicImpl impl = scenario_.comm_mapping.at(topic);
      trace_.topic_impl[topic] = impl;
      if (impl == TopicImpl::SMT) {
        for (const auto & n : subscribers_of(g, topic)) {
          if (scenario_.node_mapping.is_hw(n)) {
            sub_delegates_.emplace(
              std::make_pair(n, topic), SubDelegate{n, topic, {}, true, false});
          }
        }
      } else if (impl == TopicImpl::GW) {
        Gateway gw;
        gw.topic = topic;
        gw.state = gateway::init(own_smt_id(topic), own_hmt_id(topic)).state;
        gateways_.emplace(topic, std::move(gw));
      }
    }
    if (chain_mode) {
      chain_ = scenario_.chain;
      if (chain_.empty()) {
        throw SimulationError("empty chain");
      }
      links_ = chain_topics(g, chain_);
      for (std::size_t i = 0; i < chain_.size(); ++i) {
        chain_pos_[chain_[i]] = i;
      }
    }
  }

  SimTrace run()
  {
    for (auto & [topic, gw] : gateways_) {
      (void)topic;
      Gateway * g = &gw;
      at(0, [this, g]() {gw_step(*g, gateway::BufferLocation{0x1000});});
    }
    bool chain_fed = chain_.empty();
    for (const auto & w : scenario_.workload) {
      const bool is_chain =
        !chain_.empty() && w.publisher == chain_.front() &&
        (chain_.size() == 1 || w.topic == links_.front());
      chain_fed = chain_fed || is_chain;
      for (std::uint64_t i = 0; i < w.count; ++i) {
        const Ns fire = to_ns(w.start_us + static_cast<double>(i) * w.period_us);
        at(fire, [this, w, is_chain, fire]() {fire_workload(w, is_chain, fire);});
      }
    }
    if (!chain_fed) {
      throw SimulationError("chain head \"" + chain_.front() + "\" has no workload on its chain topic");
    }

    while (!queue_.empty()) {
      QueuedEvent ev = queue_.top();
      queue_.pop();
      now_ = ev.time;
      ev.fn();
    }

    if (!chain_.empty()) {
      if (chain_end_.size() != chain_start_.size()) {
        throw SimulationError("chain incomplete: some messages never reached the chain tail");
      }
      for (const auto & [token, start] : chain_start_) {
        trace_.chain_latencies_us.push_back(
          static_cast<double>(chain_end_.at(token) - start) / kNsPerUs);
      }
    }
    return std::move(trace_);
  }

private:
  struct QueuedEvent
  {
    Ns time;
    std::uint64_t seq;
    std::function<void()> fn;
  };
  struct Later
  {
    bool operator()(const QueuedEvent & a, const QueuedEvent & b) const
    {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };

  struct Transfer
  {
    double remaining = 0.0;
    std::uint64_t message_id = 0;
    std::uint64_t bytes = 0;
    std::string endpoint;
    std::function<void()> done;
  };

  // Delegate thread serving one hardware subscriber of one SMT topic.
  struct SubDelegate
  {
    NodeId node;
    TopicId topic;
    std::deque<SimMessage> queue;
    bool waiting = true;
    bool responding = false;
  };

  struct InFlight
  {
    std::uint64_t token;
    SimMessage message;
  };

  struct Gateway
  {
    TopicId topic;
    gateway::State state;
    bool busy = false;
    // Delegate side
    std::deque<SimMessage> reader_queue;
    bool delegate_waiting = false;
    std::optional<InFlight> inflight;
    // Core inputs, linearized
    std::deque<SimMessage> hmt_inbox;
    std::optional<SimMessage> osif_inbox;
    std::map<std::pair<std::string, std::uint64_t>, SimMessage> known;
    std::uint64_t smt_seq = 0;
    std::uint64_t hmt_seq = 0;
  };

  using ActionList = std::shared_ptr<std::vector<gateway::Action>>;

  void at(Ns time, std::function<void()> fn)
  {
    queue_.push(QueuedEvent{time, next_seq_++, std::move(fn)});
  }

  double jitter()
  {
    if (platform_.jitter_fraction == 0.0) {
      return 1.0;
    }
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    return 1.0 + platform_.jitter_fraction * u(rng_);
  }

  void record(TraceKind kind, std::uint64_t id, std::string endpoint, std::uint64_t bytes = 0,
    std::string detail = {})
  {
    trace_.events.push_back(
      TraceEvent{now_, kind, id, std::move(endpoint), bytes, std::move(detail)});
  }

  double stream_us(std::uint64_t bytes) const
  {
    return static_cast<double>(bytes) / platform_.hmt_bandwidth_bytes_per_s * kUsPerSecond;
  }

  double copy_us(std::uint64_t bytes) const
  {
    return static_cast<double>(bytes) / platform_.sw_copy_bandwidth_bytes_per_s * kUsPerSecond;
  }

  // ---------------------------------------------------------------------------
  // Publishing

  void fire_workload(const WorkloadEntry & w, bool is_chain, Ns fire)
  {
    std::optional<std::uint64_t> token;
    if (is_chain) {
      token = next_token_++;
      chain_start_[*token] = fire;
      if (chain_.size() == 1) {
        chain_end_[*token] = fire + to_ns(scenario_.compute_of(w.publisher));
        return;
      }
    }
    const Ns ready = fire + to_ns(scenario_.compute_of(w.publisher));
    at(ready, [this, w, token]() {publish(w.publisher, w.topic, w.size_bytes, token);});
  }

  void publish(
    const NodeId & node, const TopicId & topic, std::uint64_t size,
    std::optional<std::uint64_t> token)
  {
    SimMessage m;
    m.id = next_message_id_++;
    m.topic = topic;
    m.publisher_id = node;
    m.seq = seq_[{node, topic}]++;
    m.size = size;
    m.chain_token = token;
    trace_.messages.push_back(TracedMessage{m.id, topic, node, size, now_});
    record(TraceKind::PUBLISH, m.id, node, size);

    const bool hw = scenario_.node_mapping.is_hw(node);
    switch (scenario_.comm_mapping.at(topic)) {
      case TopicImpl::SMT:
        if (hw) {
          const Ns delay = to_ns(platform_.delegate_publish_us * jitter() + copy_us(size));
          at(now_ + delay, [this, m]() {dds_dispatch(m);});
        } else {
          dds_dispatch(m);
        }
        break;
      case TopicImpl::HMT:
        hmt_stream(m, nullptr);
        break;
      case TopicImpl::GW:
        if (hw) {
          hmt_stream(m, &gateways_.at(topic));
        } else {
          dds_dispatch(m);
        }
        break;
    }
  }

  // Software DDS: the dispatch CPU time is shared by all readers of the
  // publication, so every reader is notified after readers * intercept.
  void dds_dispatch(const SimMessage & m)
  {
    const auto & subs = trace_.subscribers.at(m.topic);
    const TopicImpl impl = scenario_.comm_mapping.at(m.topic);
    Gateway * gw = impl == TopicImpl::GW ? &gateways_.at(m.topic) : nullptr;

    std::size_t readers = gw != nullptr ? 1 : 0;
    for (const auto & [node, placement] : subs) {
      (void)node;
      if (placement == NodeImpl::SW || impl == TopicImpl::SMT) {
        ++readers;
      }
    }
    if (readers == 0) {
      return;
    }
    const double notify_us = static_cast<double>(readers) * platform_.sw_dds_latency.intercept_us;
    const double per_byte_us =
      platform_.sw_dds_latency.us_per_byte * static_cast<double>(m.size);

    for (const auto & [node, placement] : subs) {
      if (placement == NodeImpl::SW) {
        const NodeId n = node;
        at(now_ + to_ns(notify_us + per_byte_us), [this, n, m]() {
            deliver(n, m, TraceKind::SMT_DELIVER);
          });
      } else if (impl == TopicImpl::SMT) {
        SubDelegate * d = &sub_delegates_.at({node, m.topic});
        at(now_ + to_ns(notify_us), [this, d, m]() {
            d->queue.push_back(m);
            sub_delegate_try_respond(*d);
          });
      }
    }
    if (gw != nullptr) {
      at(now_ + to_ns(notify_us), [this, gw, m]() {
          if (m.publisher_id == gw->state.own_smt_id) {
            ++trace_.loop_injections;
          }
          gw->known[{m.publisher_id, m.seq}] = m;
          gw->reader_queue.push_back(m);
          gw_delegate_try_respond(*gw);
        });
    }
  }

  // Streams a message through a hardware-mapped topic. Every hardware
  // subscriber has its own channel; the gateway core, if any, is one more
  // subscriber on the HMT side.
  void hmt_stream(const SimMessage & m, Gateway * gw)
  {
    const Ns arrive = now_ + to_ns(platform_.hmt_latency_us + stream_us(m.size));
    for (const auto & [node, placement] : trace_.subscribers.at(m.topic)) {
      if (placement != NodeImpl::HW) {
        continue;
      }
      const NodeId n = node;
      at(arrive, [this, n, m]() {deliver(n, m, TraceKind::HMT_DELIVER);});
    }
    if (gw != nullptr) {
      at(arrive, [this, gw, m]() {
          if (m.publisher_id == gw->state.own_hmt_id) {
            ++trace_.loop_injections;
          }
          gw->known[{m.publisher_id, m.seq}] = m;
          gw->hmt_inbox.push_back(m);
          gw_pump(*gw);
        });
    }
  }

  void deliver(const NodeId & node, const SimMessage & m, TraceKind kind)
  {
    record(kind, m.id, node);
    if (!m.chain_token || chain_.empty()) {
      return;
    }
    auto pos = chain_pos_.find(node);
    if (pos == chain_pos_.end() || pos->second == 0 || links_[pos->second - 1] != m.topic) {
      return;
    }
    const std::size_t i = pos->second;
    const Ns done = now_ + to_ns(scenario_.compute_of(node));
    const std::uint64_t token = *m.chain_token;
    if (i + 1 == chain_.size()) {
      chain_end_.emplace(token, done);
      return;
    }
    const TopicId next = links_[i];
    const std::uint64_t size = scenario_.graph.topic(next).message_size_bytes;
    at(done, [this, node, next, size, token]() {publish(node, next, size, token);});
  }

  // ---------------------------------------------------------------------------
  // Shared memory port, egalitarian processor sharing

  void memif_start(const SimMessage & m, const std::string & endpoint, std::function<void()> done)
  {
    memif_advance();
    record(TraceKind::MEMIF_XFER_START, m.id, endpoint, m.size);
    active_.push_back(
      Transfer{static_cast<double>(m.size), m.id, m.size, endpoint, std::move(done)});
    memif_reschedule();
  }

  void memif_advance()
  {
    if (!active_.empty() && now_ > memif_clock_) {
      const double moved = platform_.memif_bandwidth_bytes_per_s *
        static_cast<double>(now_ - memif_clock_) / kNsPerSecond /
        static_cast<double>(active_.size());
      for (auto & t : active_) {
        t.remaining -= moved;
      }
    }
    memif_clock_ = now_;
  }

  void memif_reschedule()
  {
    const std::uint64_t version = ++memif_version_;
    if (active_.empty()) {
      return;
    }
    double min_remaining = active_.front().remaining;
    for (const auto & t : active_) {
      min_remaining = std::min(min_remaining, t.remaining);
    }
    const double share = platform_.memif_bandwidth_bytes_per_s /
      static_cast<double>(active_.size());
    const Ns dt = static_cast<Ns>(std::ceil(std::max(0.0, min_remaining) / share * kNsPerSecond));
    at(now_ + dt, [this, version]() {memif_check(version);});
  }

  void memif_check(std::uint64_t version)
  {
    if (version != memif_version_) {
      return;
    }
    memif_advance();
    constexpr double kDoneTolerance = 1e-6;
    std::vector<Transfer> finished;
    for (auto it = active_.begin(); it != active_.end(); ) {
      if (it->remaining <= kDoneTolerance) {
        finished.push_back(std::move(*it));
        it = active_.erase(it);
      } else {
        ++it;
      }
    }
    memif_reschedule();
    for (auto & t : finished) {
      record(TraceKind::MEMIF_XFER_END, t.message_id, t.endpoint, t.bytes);
      t.done();
    }
  }

  // ---------------------------------------------------------------------------
  // Hardware subscribers of software-mapped topics

  void sub_delegate_try_respond(SubDelegate & d)
  {
    if (!d.waiting || d.responding || d.queue.empty()) {
      return;
    }
    SimMessage m = d.queue.front();
    d.queue.pop_front();
    d.responding = true;
    SubDelegate * dp = &d;
    at(now_ + to_ns(platform_.osif_roundtrip_us * jitter()), [this, dp, m]() {
        dp->responding = false;
        dp->waiting = false;
        memif_start(m, dp->node, [this, dp, m]() {
          deliver(dp->node, m, TraceKind::SMT_DELIVER);
          dp->waiting = true;
          sub_delegate_try_respond(*dp);
        });
      });
  }

  // ---------------------------------------------------------------------------
  // Gateways

  gateway::Message to_fsm(const SimMessage & m) const
  {
    return gateway::Message{m.topic, m.publisher_id, m.seq, m.size, m.id};
  }

  void gw_delegate_try_respond(Gateway & g)
  {
    if (!g.delegate_waiting || g.inflight || g.reader_queue.empty()) {
      return;
    }
    SimMessage m = g.reader_queue.front();
    g.reader_queue.pop_front();
    const std::uint64_t token = next_inflight_++;
    g.inflight = InFlight{token, m};
    Gateway * gp = &g;
    at(now_ + to_ns(platform_.osif_roundtrip_us * jitter()), [this, gp, token]() {
        if (!gp->inflight || gp->inflight->token != token) {
          return;  // claimed by a cancel
        }
        gp->osif_inbox = gp->inflight->message;
        gp->inflight.reset();
        gp->delegate_waiting = false;
        gw_pump(*gp);
      });
  }

  void gw_pump(Gateway & g)
  {
    if (g.busy || g.state.phase == gateway::Phase::CANCELLING) {
      return;
    }
    // Both inputs ready: the hardware side goes first.
    if (!g.hmt_inbox.empty()) {
      SimMessage m = g.hmt_inbox.front();
      g.hmt_inbox.pop_front();
      gw_step(g, gateway::HmtArrival{to_fsm(m)});
    } else if (g.osif_inbox) {
      SimMessage m = *g.osif_inbox;
      g.osif_inbox.reset();
      gw_step(g, gateway::DelegateResponse{to_fsm(m)});
    }
  }

  void gw_step(Gateway & g, const gateway::Event & event)
  {
    gateway::StepResult r = gateway::step(g.state, event);
    g.state = std::move(r.state);
    g.busy = true;
    gw_exec(g, std::make_shared<std::vector<gateway::Action>>(std::move(r.actions)), 0);
  }

  const SimMessage & gw_lookup(Gateway & g, const gateway::Message & m) const
  {
    return g.known.at({m.publisher_id, m.seq});
  }

  SimMessage gw_republish(Gateway & g, const SimMessage & source, bool hmt_side)
  {
    SimMessage copy = source;
    copy.publisher_id = hmt_side ? g.state.own_hmt_id : g.state.own_smt_id;
    copy.seq = hmt_side ? g.hmt_seq++ : g.smt_seq++;
    return copy;
  }

  void gw_exec(Gateway & g, ActionList acts, std::size_t i)
  {
    Gateway * gp = &g;
    const std::string endpoint = gateway_endpoint(g.topic);
    for (; i < acts->size(); ++i) {
      const gateway::Action & action = (*acts)[i];
      std::uint64_t message_id = 0;
      std::visit(
        [&message_id](const auto & a) {
          if constexpr (requires {a.message;}) {
            message_id = a.message.payload_digest;
          }
        }, action);
      record(
        TraceKind::GW_ACTION, message_id, endpoint, 0, std::string(gateway::action_name(action)));

      if (std::holds_alternative<gateway::RequestSmtMessage>(action)) {
        g.delegate_waiting = true;
        gw_delegate_try_respond(g);
        continue;
      }
      if (const auto * d = std::get_if<gateway::Discard>(&action)) {
        g.known.erase({d->message.publisher_id, d->message.seq});
        ++trace_.discards;
        continue;
      }
      if (const auto * a = std::get_if<gateway::TransferToMain>(&action)) {
        const SimMessage m = gw_lookup(g, a->message);
        memif_start(m, endpoint, [this, gp, acts, i]() {gw_exec(*gp, acts, i + 1);});
        return;
      }
      if (const auto * a = std::get_if<gateway::TransferToHmt>(&action)) {
        const SimMessage m = gw_lookup(g, a->message);
        g.known.erase({a->message.publisher_id, a->message.seq});
        memif_start(m, endpoint, [this, gp, acts, i, m]() {
            SimMessage copy = gw_republish(*gp, m, true);
            hmt_stream(copy, gp);
            at(now_ + to_ns(stream_us(m.size)), [this, gp, acts, i]() {
              gw_exec(*gp, acts, i + 1);
            });
          });
        return;
      }
      if (const auto * a = std::get_if<gateway::PublishSmt>(&action)) {
        const SimMessage m = gw_lookup(g, a->message);
        g.known.erase({a->message.publisher_id, a->message.seq});
        const Ns delay = to_ns(platform_.delegate_publish_us * jitter() + copy_us(m.size));
        at(now_ + delay, [this, gp, acts, i, m]() {
            dds_dispatch(gw_republish(*gp, m, false));
            gw_exec(*gp, acts, i + 1);
          });
        return;
      }
      if (std::holds_alternative<gateway::CancelSmtRequest>(action)) {
        at(now_ + to_ns(platform_.osif_roundtrip_us * jitter()), [this, gp, acts, i]() {
            gateway::CancelResult result;
            if (gp->osif_inbox) {
              result.message = to_fsm(*gp->osif_inbox);
              gp->osif_inbox.reset();
            } else if (gp->inflight) {
              result.message = to_fsm(gp->inflight->message);
              gp->inflight.reset();
            }
            gp->delegate_waiting = false;
            gateway::StepResult r = gateway::step(gp->state, result);
            gp->state = std::move(r.state);
            acts->insert(acts->begin() + static_cast<std::ptrdiff_t>(i + 1),
            r.actions.begin(), r.actions.end());
            gw_exec(*gp, acts, i + 1);
          });
        return;
      }
    }
    g.busy = false;
    gw_pump(g);
  }

  Scenario scenario_;
  PlatformModel platform_;
  std::mt19937_64 rng_;
  SimTrace trace_;

  std::priority_queue<QueuedEvent, std::vector<QueuedEvent>, Later> queue_;
  Ns now_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t next_message_id_ = 1;
  std::uint64_t next_inflight_ = 1;
  std::uint64_t next_token_ = 0;
  std::map<std::pair<std::string, TopicId>, std::uint64_t> seq_;

  std::vector<Transfer> active_;
  Ns memif_clock_ = 0;
  std::uint64_t memif_version_ = 0;

  std::map<std::pair<NodeId, TopicId>, SubDelegate> sub_delegates_;
  std::map<TopicId, Gateway> gateways_;

  std::vector<NodeId> chain_;
  std::vector<TopicId> links_;
  std::map<NodeId, std::size_t> chain_pos_;
  std::map<std::uint64_t, Ns> chain_start_;
  std::map<std::uint64_t, Ns> chain_end_;
};

std::string format_us(std::int64_t ns)
{
  char buf[48];
  const char * sign = ns < 0 ? "-" : "";
  const std::int64_t a = ns < 0 ? -ns : ns;
  std::snprintf(
    buf, sizeof(buf), "%s%lld.%03lld", sign, static_cast<long long>(a / 1000),
    static_cast<long long>(a % 1000));
  return buf;
}

}  // namespace

SimTrace simulate(const Scenario & scenario, const PlatformModel & platform)
{
  return Simulator(scenario, platform, false).run();
}

ChainResult run_chain_scenario(
  const Scenario & scenario, const PlatformModel & platform, const std::vector<NodeId> & chain)
{
  Scenario s = scenario;
  s.chain = chain;
  SimTrace trace = Simulator(s, platform, true).run();

  ChainResult r;
  r.samples_us = std::move(trace.chain_latencies_us);
  if (r.samples_us.empty()) {
    return r;
  }
  double sum = 0.0;
  for (double v : r.samples_us) {
    sum += v;
  }
  r.mean_us = sum / static_cast<double>(r.samples_us.size());
  if (r.samples_us.size() > 1) {
    double sq = 0.0;
    for (double v : r.samples_us) {
      sq += (v - r.mean_us) * (v - r.mean_us);
    }
    r.stddev_us = std::sqrt(sq / static_cast<double>(r.samples_us.size() - 1));
  }
  return r;
}

std::string trace_to_csv(const SimTrace & trace)
{
  std::ostringstream out;
  out << "timestamp_us,kind,message_id,endpoint\n";
  for (const auto & e : trace.events) {
    out << format_us(e.time_ns) << ',' << to_string(e.kind) << ',' << e.message_id << ','
        << e.endpoint << '\n';
  }
  return out.str();
}

TransferStats compute_stats(const SimTrace & trace)
{
  std::map<std::uint64_t, const TracedMessage *> by_id;
  for (const auto & m : trace.messages) {
    by_id[m.id] = &m;
  }
  // (message, subscriber) -> delivery time
  std::map<std::pair<std::uint64_t, NodeId>, std::int64_t> delivered;
  for (const auto & e : trace.events) {
    if (e.kind != TraceKind::HMT_DELIVER && e.kind != TraceKind::SMT_DELIVER) {
      continue;
    }
    if (by_id.count(e.message_id) == 0) {
      throw SimulationError("trace delivers unknown message " + std::to_string(e.message_id));
    }
    if (!delivered.emplace(std::make_pair(e.message_id, e.endpoint), e.time_ns).second) {
      throw SimulationError(
              "duplicate delivery of message " + std::to_string(e.message_id) + " to " +
              e.endpoint);
    }
  }

  struct Acc
  {
    NodeImpl impl;
    std::size_t count = 0;
    double sum = 0.0;
    double max = 0.0;
  };
  std::map<std::pair<TopicId, NodeId>, Acc> acc;
  struct TopicAcc
  {
    std::size_t messages = 0;
    std::size_t hw_n = 0;
    std::size_t sw_n = 0;
    double hw_sum = 0.0;
    double sw_sum = 0.0;
  };
  std::map<TopicId, TopicAcc> topic_acc;

  for (const auto & m : trace.messages) {
    const auto & subs = trace.subscribers.at(m.topic);
    std::optional<double> hw_max;
    std::optional<double> sw_max;
    for (const auto & [node, impl] : subs) {
      auto it = delivered.find({m.id, node});
      if (it == delivered.end()) {
        throw SimulationError(
                "incomplete trace: message " + std::to_string(m.id) + " on \"" + m.topic +
                "\" never reached \"" + node + "\"");
      }
      const double us = static_cast<double>(it->second - m.publish_ns) / kNsPerUs;
      auto [a, inserted] = acc.try_emplace({m.topic, node}, Acc{impl});
      (void)inserted;
      a->second.count++;
      a->second.sum += us;
      a->second.max = std::max(a->second.max, us);
      auto & slot = impl == NodeImpl::HW ? hw_max : sw_max;
      slot = slot ? std::max(*slot, us) : us;
    }
    auto & ta = topic_acc[m.topic];
    ta.messages++;
    if (hw_max) {
      ta.hw_n++;
      ta.hw_sum += *hw_max;
    }
    if (sw_max) {
      ta.sw_n++;
      ta.sw_sum += *sw_max;
    }
  }

  TransferStats stats;
  for (const auto & [key, a] : acc) {
    stats.per_subscriber.push_back(
      SubscriberStats{key.first, key.second, a.impl, a.count,
        a.sum / static_cast<double>(a.count), a.max});
  }
  for (const auto & [topic, ta] : topic_acc) {
    TopicStats ts;
    ts.topic = topic;
    ts.messages = ta.messages;
    if (ta.hw_n > 0) {
      ts.t_trans_hw_us = ta.hw_sum / static_cast<double>(ta.hw_n);
    }
    if (ta.sw_n > 0) {
      ts.t_trans_sw_us = ta.sw_sum / static_cast<double>(ta.sw_n);
    }
    stats.per_topic.emplace(topic, std::move(ts));
  }
  return stats;
}

std::string stats_to_csv(const TransferStats & stats)
{
  std::ostringstream out;
  out << "topic,subscriber,impl,count,mean_us,max_us\n";
  char buf[64];
  for (const auto & s : stats.per_subscriber) {
    out << s.topic << ',' << s.subscriber << ',' << to_string(s.impl) << ',' << s.count << ',';
    std::snprintf(buf, sizeof(buf), "%.3f,%.3f", s.mean_us, s.max_us);
    out << buf << '\n';
  }
  return out.str();
}

}  // namespace topomap
