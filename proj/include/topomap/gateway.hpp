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

#ifndef TOPOMAP__GATEWAY_HPP_
#define TOPOMAP__GATEWAY_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "topomap/graph.hpp"

namespace topomap::gateway
{

/// Stable phases are AWAIT_BUFFER, POLLING and CANCELLING. The others are
/// passed through inside a single step() and only show up in the exported
/// transition table.
enum class Phase
{
  AWAIT_BUFFER,
  POLLING,
  FWD_SMT_TO_HMT,
  FWD_HMT_TO_MAIN,
  CANCELLING,
  FLUSH_PENDING,
  PUBLISH_SMT,
};

inline constexpr Phase kAllPhases[] = {
  Phase::AWAIT_BUFFER, Phase::POLLING, Phase::FWD_SMT_TO_HMT, Phase::FWD_HMT_TO_MAIN,
  Phase::CANCELLING, Phase::FLUSH_PENDING, Phase::PUBLISH_SMT,
};

std::string_view to_string(Phase phase);

enum class Side { SMT_SIDE, HMT_SIDE };
enum class Verdict { ACCEPT, REJECT };

struct Message
{
  TopicId topic;
  std::string publisher_id;
  std::uint64_t seq = 0;
  std::uint64_t size_bytes = 1;
  std::uint64_t payload_digest = 0;

  bool operator==(const Message &) const = default;
};

// Events
struct BufferLocation { std::uint64_t addr = 0; };
struct DelegateResponse { Message message; };
struct HmtArrival { Message message; };
struct CancelResult { std::optional<Message> message; };

using Event = std::variant<BufferLocation, DelegateResponse, HmtArrival, CancelResult>;

std::string_view event_name(const Event & event);

// Actions
struct RequestSmtMessage
{
  bool operator==(const RequestSmtMessage &) const = default;
};
struct CancelSmtRequest
{
  bool operator==(const CancelSmtRequest &) const = default;
};
struct TransferToHmt
{
  Message message;
  bool operator==(const TransferToHmt &) const = default;
};
struct TransferToMain
{
  Message message;
  bool operator==(const TransferToMain &) const = default;
};
struct PublishSmt
{
  Message message;
  bool operator==(const PublishSmt &) const = default;
};
struct Discard
{
  Message message;
  std::string reason;
  bool operator==(const Discard &) const = default;
};

using Action = std::variant<
  RequestSmtMessage, CancelSmtRequest, TransferToHmt, TransferToMain, PublishSmt, Discard>;

std::string_view action_name(const Action & action);
std::string describe(const Action & action);

struct State
{
  Phase phase = Phase::AWAIT_BUFFER;
  bool outstanding_request = false;
  std::string own_smt_id;
  std::string own_hmt_id;
  std::optional<std::uint64_t> buffer_addr;
  /// Message taken from the HMT while its SMT publication waits for the
  /// cancel to complete.
  std::optional<Message> held;

  bool operator==(const State &) const = default;
};

struct StepResult
{
  State state;
  std::vector<Action> actions;
};

/// Raised for an event that has no transition in the current phase.
class ProtocolError : public std::runtime_error
{
public:
  ProtocolError(Phase phase, std::string event);

  Phase phase() const noexcept {return phase_;}
  const std::string & event() const noexcept {return event_;}

private:
  Phase phase_;
  std::string event_;
};

/// Fresh gateway core waiting for its SMT output buffer location.
/// The returned action list is empty.
StepResult init(std::string own_smt_id, std::string own_hmt_id);

/// Pure transition function. Throws ProtocolError for illegal events.
StepResult step(const State & state, const Event & event);

/// Rejects messages this gateway published itself on the arriving side.
Verdict filter(const Message & message, Side side, const State & state);

/// Declarative transition table (phases, events, rows with guards and
/// actions) as a JSON document.
std::string transition_table_json();

}  // namespace topomap::gateway

#endif  // TOPOMAP__GATEWAY_HPP_
