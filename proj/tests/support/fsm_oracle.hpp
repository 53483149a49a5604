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

#ifndef SUPPORT__FSM_ORACLE_HPP_
#define SUPPORT__FSM_ORACLE_HPP_

// Brute-force interpreter of the exported gateway transition table. It only
// reads the JSON document and shares no code with gateway::step().

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "topomap/gateway.hpp"

namespace oracle
{

namespace gw = topomap::gateway;

struct Row
{
  std::string from;
  std::string event;
  std::string guard;
  std::string to;
  // (action name, message source: "", "event" or "held")
  std::vector<std::pair<std::string, std::string>> actions;
  bool store_buffer = false;
  bool hold_event = false;
  bool release = false;
};

struct State
{
  std::string phase;
  bool outstanding_request = false;
  std::optional<std::uint64_t> buffer_addr;
  std::optional<gw::Message> held;
};

struct Outcome
{
  bool error = false;
  State state;
  // (action name, message) pairs; reasons are not part of the table.
  std::vector<std::pair<std::string, std::optional<gw::Message>>> actions;
};

class TableInterpreter
{
public:
  TableInterpreter(const std::string & table_json, std::string own_smt, std::string own_hmt)
  : own_smt_(std::move(own_smt)), own_hmt_(std::move(own_hmt))
  {
    const auto doc = nlohmann::json::parse(table_json);
    initial_ = doc.at("initial").get<std::string>();
    for (const auto & r : doc.at("transitions")) {
      Row row;
      row.from = r.at("from");
      row.event = r.at("event");
      row.guard = r.at("guard");
      row.to = r.at("to");
      for (const auto & a : r.at("actions")) {
        row.actions.emplace_back(a.at("action"), a.value("message", std::string()));
      }
      const auto & fx = r.at("effects");
      row.store_buffer = fx.value("store_buffer", false);
      row.hold_event = fx.value("hold", std::string()) == "event";
      row.release = fx.value("release", false);
      rows_.push_back(std::move(row));
    }
    for (const auto & [side, f] : doc.at("filters").items()) {
      const std::string who = f.at("reject_if_publisher_equals");
      (side == "SMT_SIDE" ? smt_reject_ : hmt_reject_) = who == "own_smt_id" ? own_smt_ : own_hmt_;
    }
    for (const auto & e : doc.at("events")) {
      if (!e.at("side").is_null()) {
        event_side_[e.at("name")] = e.at("side");
      }
    }
  }

  State initial() const {return State{initial_, false, std::nullopt, std::nullopt};}

  Outcome step(const State & s, const gw::Event & event) const
  {
    Outcome out{false, s, {}};
    const std::string name(gw::event_name(event));
    std::optional<gw::Message> msg;
    std::optional<std::uint64_t> addr;
    if (const auto * b = std::get_if<gw::BufferLocation>(&event)) {
      addr = b->addr;
    } else if (const auto * d = std::get_if<gw::DelegateResponse>(&event)) {
      msg = d->message;
    } else if (const auto * h = std::get_if<gw::HmtArrival>(&event)) {
      msg = h->message;
    } else if (const auto * c = std::get_if<gw::CancelResult>(&event)) {
      msg = c->message;
    }

    const Row * row = nullptr;
    for (const auto & r : rows_) {
      if (r.from == s.phase && r.event == name && guard_holds(r.guard, name, msg)) {
        row = &r;
        break;
      }
    }
    if (row == nullptr) {
      out.error = true;
      return out;
    }
    if (name == "DelegateResponse" || name == "CancelResult") {
      out.state.outstanding_request = false;
    }
    apply(*row, msg, addr, out);
    // Follow automatic rows out of transient phases.
    for (int guard = 0; guard < 16; ++guard) {
      const Row * next = nullptr;
      for (const auto & r : rows_) {
        if (r.from == out.state.phase && r.event == "auto") {
          next = &r;
          break;
        }
      }
      if (next == nullptr) {
        return out;
      }
      apply(*next, msg, std::nullopt, out);
    }
    throw std::logic_error("transition table loops through auto rows");
  }

private:
  bool guard_holds(
    const std::string & guard, const std::string & event,
    const std::optional<gw::Message> & msg) const
  {
    if (guard == "always") {
      return true;
    }
    if (guard == "empty") {
      return !msg.has_value();
    }
    if (!msg) {
      return false;
    }
    const std::string & reject = event_side_.at(event) == "SMT_SIDE" ? smt_reject_ : hmt_reject_;
    const bool accepted = msg->publisher_id != reject;
    return guard == "accept" ? accepted : !accepted;
  }

  void apply(
    const Row & row, const std::optional<gw::Message> & msg,
    const std::optional<std::uint64_t> & addr, Outcome & out) const
  {
    if (row.store_buffer) {
      out.state.buffer_addr = addr;
    }
    if (row.hold_event) {
      out.state.held = msg;
    }
    for (const auto & [action, source] : row.actions) {
      std::optional<gw::Message> arg;
      if (source == "event") {
        arg = msg;
      } else if (source == "held") {
        arg = out.state.held;
      }
      out.actions.emplace_back(action, arg);
      if (action == "RequestSmtMessage") {
        out.state.outstanding_request = true;
      }
    }
    if (row.release) {
      out.state.held.reset();
    }
    out.state.phase = row.to;
  }

  std::string own_smt_;
  std::string own_hmt_;
  std::string smt_reject_;
  std::string hmt_reject_;
  std::string initial_;
  std::vector<Row> rows_;
  std::map<std::string, std::string> event_side_;
};

/// Projects an implementation action onto the oracle's (name, message) form.
inline std::pair<std::string, std::optional<gw::Message>> project(const gw::Action & a)
{
  std::optional<gw::Message> m;
  std::visit(
    [&m](const auto & x) {
      if constexpr (requires {x.message;}) {
        m = x.message;
      }
    }, a);
  return {std::string(gw::action_name(a)), m};
}

/// Empty string when implementation and oracle agree, else a description.
inline std::string compare(const gw::StepResult & impl, const Outcome & o)
{
  if (std::string(gw::to_string(impl.state.phase)) != o.state.phase) {
    return "phase " + std::string(gw::to_string(impl.state.phase)) + " vs " + o.state.phase;
  }
  if (impl.state.outstanding_request != o.state.outstanding_request) {
    return "outstanding_request differs";
  }
  if (impl.state.buffer_addr != o.state.buffer_addr) {
    return "buffer address differs";
  }
  if (impl.state.held != o.state.held) {
    return "held message differs";
  }
  if (impl.actions.size() != o.actions.size()) {
    return "action count " + std::to_string(impl.actions.size()) + " vs " +
           std::to_string(o.actions.size());
  }
  for (std::size_t i = 0; i < impl.actions.size(); ++i) {
    if (project(impl.actions[i]) != o.actions[i]) {
      return "action " + std::to_string(i) + ": " + gw::describe(impl.actions[i]) + " vs " +
             o.actions[i].first;
    }
  }
  return {};
}

struct ExhaustiveReport
{
  std::size_t sequences = 0;
  std::size_t mismatches = 0;
  std::string first_mismatch;
};

/// Event alphabet: BufferLocation, then DelegateResponse, HmtArrival and
/// CancelResult(message) from each of ext1, ext2, own SMT and own HMT
/// publisher, then an empty CancelResult. Messages carry `seq` so repeated
/// letters stay distinguishable.
inline std::vector<gw::Event> alphabet(
  const std::string & own_smt, const std::string & own_hmt, std::uint64_t seq)
{
  std::vector<gw::Event> out{gw::BufferLocation{0x4000}};
  const std::string pubs[] = {"ext1", "ext2", own_smt, own_hmt};
  for (const auto & p : pubs) {
    out.push_back(gw::DelegateResponse{gw::Message{"t", p, seq, 64, seq}});
  }
  for (const auto & p : pubs) {
    out.push_back(gw::HmtArrival{gw::Message{"t", p, seq, 64, seq}});
  }
  for (const auto & p : pubs) {
    out.push_back(gw::CancelResult{gw::Message{"t", p, seq, 64, seq}});
  }
  out.push_back(gw::CancelResult{std::nullopt});
  return out;
}

/// Enumerates every event sequence of length 1..max_len and checks that
/// gateway::step() and the table interpreter agree after each prefix. Once
/// both raise a protocol error the sequence is dead and longer extensions
/// are counted without being stepped.
inline ExhaustiveReport exhaustive_equivalence(std::size_t max_len)
{
  const std::string own_smt = "gw_smt";
  const std::string own_hmt = "gw_hmt";
  const TableInterpreter table(gw::transition_table_json(), own_smt, own_hmt);
  ExhaustiveReport report;
  const std::size_t letters = alphabet(own_smt, own_hmt, 0).size();

  std::function<void(const gw::State &, const State &, std::size_t, std::string)> dfs =
    [&](const gw::State & is, const State & os, std::size_t depth, std::string path) {
      if (depth == max_len) {
        return;
      }
      const auto events = alphabet(own_smt, own_hmt, depth);
      for (std::size_t i = 0; i < letters; ++i) {
        const std::string here = path + (path.empty() ? "" : " ") + std::to_string(i);
        std::optional<gw::StepResult> ir;
        try {
          ir = gw::step(is, events[i]);
        } catch (const gw::ProtocolError &) {
        }
        const Outcome o = table.step(os, events[i]);
        std::size_t subtree = 1;
        std::size_t pow = 1;
        for (std::size_t d = depth + 1; d < max_len; ++d) {
          pow *= letters;
          subtree += pow;
        }
        if (!ir.has_value() || o.error) {
          report.sequences += subtree;
          if (ir.has_value() != !o.error) {
            report.mismatches += subtree;
            if (report.first_mismatch.empty()) {
              report.first_mismatch = here + ": error disagreement";
            }
          }
          continue;
        }
        ++report.sequences;
        const std::string diff = compare(*ir, o);
        if (!diff.empty()) {
          ++report.mismatches;
          if (report.first_mismatch.empty()) {
            report.first_mismatch = here + ": " + diff;
          }
        }
        dfs(ir->state, o.state, depth + 1, here);
      }
    };
  dfs(gw::init(own_smt, own_hmt).state, table.initial(), 0, "");
  return report;
}

}  // namespace oracle

#endif  // SUPPORT__FSM_ORACLE_HPP_
