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

#include "topomap/gateway.hpp"

#include <utility>

#include "json.hpp"

namespace topomap::gateway
{

using json = nlohmann::json;

std::string_view to_string(Phase phase)
{
  switch (phase) {
    case Phase::AWAIT_BUFFER: return "AWAIT_BUFFER";
    case Phase::POLLING: return "POLLING";
    case Phase::FWD_SMT_TO_HMT: return "FWD_SMT_TO_HMT";
    case Phase::FWD_HMT_TO_MAIN: return "FWD_HMT_TO_MAIN";
    case Phase::CANCELLING: return "CANCELLING";
    case Phase::FLUSH_PENDING: return "FLUSH_PENDING";
    case Phase::PUBLISH_SMT: return "PUBLISH_SMT";
  }
  return "?";
}

namespace
{

template<class ... Ts>
struct overloaded : Ts ... { using Ts::operator() ...; };
template<class ... Ts>
overloaded(Ts ...)->overloaded<Ts...>;

constexpr const char * kOwnSmtReason = "publisher id matches own SMT publisher";
constexpr const char * kOwnHmtReason = "publisher id matches own HMT publisher";

}  // namespace

std::string_view event_name(const Event & event)
{
  return std::visit(
    overloaded{
      [](const BufferLocation &) {return std::string_view("BufferLocation");},
      [](const DelegateResponse &) {return std::string_view("DelegateResponse");},
      [](const HmtArrival &) {return std::string_view("HmtArrival");},
      [](const CancelResult &) {return std::string_view("CancelResult");},
    }, event);
}

std::string_view action_name(const Action & action)
{
  return std::visit(
    overloaded{
      [](const RequestSmtMessage &) {return std::string_view("RequestSmtMessage");},
      [](const CancelSmtRequest &) {return std::string_view("CancelSmtRequest");},
      [](const TransferToHmt &) {return std::string_view("TransferToHmt");},
      [](const TransferToMain &) {return std::string_view("TransferToMain");},
      [](const PublishSmt &) {return std::string_view("PublishSmt");},
      [](const Discard &) {return std::string_view("Discard");},
    }, action);
}

std::string describe(const Action & action)
{
  std::string out(action_name(action));
  std::visit(
    overloaded{
      [](const RequestSmtMessage &) {},
      [](const CancelSmtRequest &) {},
      [&out](const auto & a) {
        out += "(" + a.message.publisher_id + "#" + std::to_string(a.message.seq) + ")";
      },
    }, action);
  return out;
}

ProtocolError::ProtocolError(Phase phase, std::string event)
: std::runtime_error(
    "gateway protocol error: event " + event + " is illegal in phase " +
    std::string(to_string(phase))),
  phase_(phase),
  event_(std::move(event))
{}

StepResult init(std::string own_smt_id, std::string own_hmt_id)
{
  StepResult r;
  r.state.phase = Phase::AWAIT_BUFFER;
  r.state.own_smt_id = std::move(own_smt_id);
  r.state.own_hmt_id = std::move(own_hmt_id);
  return r;
}

Verdict filter(const Message & message, Side side, const State & state)
{
  const std::string & own = side == Side::SMT_SIDE ? state.own_smt_id : state.own_hmt_id;
  return message.publisher_id == own ? Verdict::REJECT : Verdict::ACCEPT;
}

StepResult step(const State & state, const Event & event)
{
  StepResult r{state, {}};
  State & s = r.state;
  auto & out = r.actions;
  auto illegal = [&]() {return ProtocolError(state.phase, std::string(event_name(event)));};

  // Runs the tail shared by both CancelResult branches: the held HMT message
  // goes out on the SMT, then a fresh request is issued.
  auto publish_held = [&]() {
      s.phase = Phase::PUBLISH_SMT;
      out.push_back(PublishSmt{*s.held});
      s.held.reset();
      out.push_back(RequestSmtMessage{});
      s.outstanding_request = true;
      s.phase = Phase::POLLING;
    };

  switch (state.phase) {
    case Phase::AWAIT_BUFFER: {
        const auto * loc = std::get_if<BufferLocation>(&event);
        if (loc == nullptr) {
          throw illegal();
        }
        s.buffer_addr = loc->addr;
        out.push_back(RequestSmtMessage{});
        s.outstanding_request = true;
        s.phase = Phase::POLLING;
        return r;
      }

    case Phase::POLLING:
      if (const auto * resp = std::get_if<DelegateResponse>(&event)) {
        s.outstanding_request = false;
        if (filter(resp->message, Side::SMT_SIDE, s) == Verdict::ACCEPT) {
          s.phase = Phase::FWD_SMT_TO_HMT;
          out.push_back(TransferToHmt{resp->message});
        } else {
          out.push_back(Discard{resp->message, kOwnSmtReason});
        }
        out.push_back(RequestSmtMessage{});
        s.outstanding_request = true;
        s.phase = Phase::POLLING;
        return r;
      }
      if (const auto * arrival = std::get_if<HmtArrival>(&event)) {
        if (filter(arrival->message, Side::HMT_SIDE, s) == Verdict::REJECT) {
          out.push_back(Discard{arrival->message, kOwnHmtReason});
          return r;
        }
        s.phase = Phase::FWD_HMT_TO_MAIN;
        s.held = arrival->message;
        out.push_back(TransferToMain{arrival->message});
        out.push_back(CancelSmtRequest{});
        s.phase = Phase::CANCELLING;
        return r;
      }
      throw illegal();

    case Phase::CANCELLING: {
        const auto * result = std::get_if<CancelResult>(&event);
        if (result == nullptr) {
          throw illegal();
        }
        s.outstanding_request = false;
        if (result->message) {
          if (filter(*result->message, Side::SMT_SIDE, s) == Verdict::ACCEPT) {
            s.phase = Phase::FLUSH_PENDING;
            out.push_back(TransferToHmt{*result->message});
          } else {
            out.push_back(Discard{*result->message, kOwnSmtReason});
          }
        }
        publish_held();
        return r;
      }

    case Phase::FWD_SMT_TO_HMT:
    case Phase::FWD_HMT_TO_MAIN:
    case Phase::FLUSH_PENDING:
    case Phase::PUBLISH_SMT:
      // Transient phases never survive a step.
      throw illegal();
  }
  throw illegal();
}

std::string transition_table_json()
{
  json doc;
  doc["phases"] = json::array();
  for (Phase p : kAllPhases) {
    doc["phases"].push_back(std::string(to_string(p)));
  }
  doc["initial"] = "AWAIT_BUFFER";
  doc["stable_phases"] = {"AWAIT_BUFFER", "POLLING", "CANCELLING"};
  doc["events"] = json::array(
  {
    {{"name", "BufferLocation"}, {"carries", "address"}, {"side", nullptr}},
    {{"name", "DelegateResponse"}, {"carries", "message"}, {"side", "SMT_SIDE"}},
    {{"name", "HmtArrival"}, {"carries", "message"}, {"side", "HMT_SIDE"}},
    {{"name", "CancelResult"}, {"carries", "optional_message"}, {"side", "SMT_SIDE"}},
  });
  doc["actions"] = {
    "RequestSmtMessage", "CancelSmtRequest", "TransferToHmt", "TransferToMain", "PublishSmt",
    "Discard"};
  doc["filters"] = {
    {"SMT_SIDE", {{"reject_if_publisher_equals", "own_smt_id"}}},
    {"HMT_SIDE", {{"reject_if_publisher_equals", "own_hmt_id"}}},
  };

  // guard: always | accept | reject | empty. "auto" rows fire without an
  // event when the machine sits in a transient phase. Action arguments name
  // the message source: the triggering event or the held message.
  auto row = [](
    const char * from, const char * event, const char * guard, const char * to,
    json actions, json effects = json::object()) {
      return json{
        {"from", from}, {"event", event}, {"guard", guard}, {"to", to},
        {"actions", std::move(actions)}, {"effects", std::move(effects)}};
    };
  auto act = [](const char * name, const char * arg = nullptr) {
      json a{{"action", name}};
      if (arg != nullptr) {
        a["message"] = arg;
      }
      return a;
    };

  doc["transitions"] = json::array(
  {
    row(
      "AWAIT_BUFFER", "BufferLocation", "always", "POLLING", {act("RequestSmtMessage")},
      {{"store_buffer", true}}),
    row(
      "POLLING", "DelegateResponse", "accept", "FWD_SMT_TO_HMT",
      {act("TransferToHmt", "event")}),
    row("FWD_SMT_TO_HMT", "auto", "always", "POLLING", {act("RequestSmtMessage")}),
    row(
      "POLLING", "DelegateResponse", "reject", "POLLING",
      {act("Discard", "event"), act("RequestSmtMessage")}),
    row(
      "POLLING", "HmtArrival", "accept", "FWD_HMT_TO_MAIN", {act("TransferToMain", "event")},
      {{"hold", "event"}}),
    row("FWD_HMT_TO_MAIN", "auto", "always", "CANCELLING", {act("CancelSmtRequest")}),
    row("POLLING", "HmtArrival", "reject", "POLLING", {act("Discard", "event")}),
    row("CANCELLING", "CancelResult", "empty", "PUBLISH_SMT", json::array()),
    row(
      "CANCELLING", "CancelResult", "accept", "FLUSH_PENDING",
      {act("TransferToHmt", "event")}),
    row("CANCELLING", "CancelResult", "reject", "PUBLISH_SMT", {act("Discard", "event")}),
    row("FLUSH_PENDING", "auto", "always", "PUBLISH_SMT", json::array()),
    row(
      "PUBLISH_SMT", "auto", "always", "POLLING",
      {act("PublishSmt", "held"), act("RequestSmtMessage")}, {{"release", true}}),
  });
  return doc.dump(2) + "\n";
}

}  // namespace topomap::gateway
