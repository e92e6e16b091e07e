#include "socketstore/wire/message.hpp"

#include <array>
#include <utility>

namespace socketstore::wire {

namespace {

constexpr std::array<std::pair<MsgKind, std::string_view>, 12> kKinds{{
    {MsgKind::hello, "Hello"},
    {MsgKind::to_request, "ToRequest"},
    {MsgKind::to_response, "ToResponse"},
    {MsgKind::open_session, "OpenSession"},
    {MsgKind::session_opened, "SessionOpened"},
    {MsgKind::data, "Data"},
    {MsgKind::close_session, "CloseSession"},
    {MsgKind::session_closed, "SessionClosed"},
    {MsgKind::subscribe, "Subscribe"},
    {MsgKind::event, "Event"},
    {MsgKind::sample, "Sample"},
    {MsgKind::error, "Error"},
}};

}  // namespace

std::string_view msg_kind_name(MsgKind k) {
  for (const auto& [kind, name] : kKinds) {
    if (kind == k) return name;
  }
  return "Error";
}

std::optional<MsgKind> msg_kind_from_name(std::string_view name) {
  for (const auto& [kind, n] : kKinds) {
    if (n == name) return kind;
  }
  return std::nullopt;
}

core::Json Message::to_json() const {
  return core::Json{{"kind", msg_kind_name(kind)}, {"correlation_id", correlation_id}, {"body", body}};
}

core::Result<Message> Message::from_json(const core::Json& j) {
  if (!j.is_object()) return core::Error{core::Errc::protocol_error, "message must be an object"};
  if (!j.contains("kind") || !j["kind"].is_string()) {
    return core::Error{core::Errc::protocol_error, "missing message kind"};
  }
  auto kind = msg_kind_from_name(j["kind"].get<std::string>());
  if (!kind) {
    return core::Error{core::Errc::protocol_error,
                       "unknown message kind '" + j["kind"].get<std::string>() + "'"};
  }
  Message out;
  out.kind = *kind;
  if (j.contains("correlation_id") && j["correlation_id"].is_number_integer()) {
    out.correlation_id = j["correlation_id"];
  }
  if (j.contains("body")) {
    if (!j["body"].is_object()) {
      return core::Error{core::Errc::protocol_error, "message body must be an object"};
    }
    out.body = j["body"];
  }
  return out;
}

MsgKind response_kind_for(MsgKind request) {
  switch (request) {
    case MsgKind::hello: return MsgKind::hello;
    case MsgKind::to_request: return MsgKind::to_response;
    case MsgKind::open_session: return MsgKind::session_opened;
    case MsgKind::data: return MsgKind::data;
    case MsgKind::close_session: return MsgKind::session_closed;
    case MsgKind::subscribe: return MsgKind::subscribe;
    case MsgKind::sample: return MsgKind::sample;
    default: return MsgKind::error;
  }
}

Message make_error_reply(std::int64_t correlation_id, const core::Error& err) {
  Message m;
  m.kind = MsgKind::error;
  m.correlation_id = correlation_id;
  m.body = core::Json{{"code", std::string(core::errc_name(err.code))}, {"detail", err.detail}};
  return m;
}

}  // namespace socketstore::wire
