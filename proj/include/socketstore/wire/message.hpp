#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "socketstore/core/json.hpp"

namespace socketstore::wire {

// Protocol version announced in Hello and echoed back.
inline constexpr int protocol_version = 1;

enum class MsgKind {
  hello,
  to_request,
  to_response,
  open_session,
  session_opened,
  data,
  close_session,
  session_closed,
  subscribe,
  event,
  sample,
  error,
};

std::string_view msg_kind_name(MsgKind k);
std::optional<MsgKind> msg_kind_from_name(std::string_view name);

// One protocol message. Requests carry a fresh positive correlation_id; the
// response echoes it. Server-initiated pushes (Event, incoming Data) use
// correlation_id 0.
struct Message {
  MsgKind kind = MsgKind::error;
  std::int64_t correlation_id = 0;
  core::Json body = core::Json::object();

  core::Json to_json() const;
  static core::Result<Message> from_json(const core::Json& j);

  friend bool operator==(const Message& a, const Message& b) {
    return a.kind == b.kind && a.correlation_id == b.correlation_id && a.body == b.body;
  }
};

// The response kind paired with each request kind.
MsgKind response_kind_for(MsgKind request);

Message make_error_reply(std::int64_t correlation_id, const core::Error& err);

}  // namespace socketstore::wire
