#include "socketstore/wire/codec.hpp"

#include <cstdint>

namespace socketstore::wire {

namespace {

void put_be32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>((v >> 24) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>(v & 0xff));
}

std::uint32_t get_be32(std::string_view in) {
  return (static_cast<std::uint32_t>(static_cast<unsigned char>(in[0])) << 24) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(in[1])) << 16) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(in[2])) << 8) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(in[3]));
}

}  // namespace

core::Result<std::string> encode_frame(const Message& msg) {
  std::string payload = core::canonical_dump(msg.to_json());
  if (payload.size() > max_frame_payload) {
    return core::Error{core::Errc::frame_too_large,
                       "payload of " + std::to_string(payload.size()) + " bytes exceeds bound"};
  }
  std::string out;
  out.reserve(payload.size() + 4);
  put_be32(out, static_cast<std::uint32_t>(payload.size()));
  out.append(payload);
  return out;
}

core::Result<DecodeOutcome> decode_frame(std::string_view buffer) {
  if (buffer.size() < 4) return DecodeOutcome{};
  const std::uint32_t length = get_be32(buffer);
  if (length > max_frame_payload) {
    return core::Error{core::Errc::protocol_error,
                       "declared frame length " + std::to_string(length) + " exceeds bound"};
  }
  if (buffer.size() < 4u + length) return DecodeOutcome{};
  auto parsed = core::parse_json(buffer.substr(4, length));
  if (!parsed) return parsed.error();
  auto msg = Message::from_json(parsed.value());
  if (!msg) return msg.error();
  return DecodeOutcome{std::move(msg).value(), 4u + length};
}

core::Result<std::optional<Message>> FrameDecoder::next() {
  auto outcome = decode_frame(buffer_);
  if (!outcome) return outcome.error();
  if (outcome.value().need_more()) return std::optional<Message>{};
  buffer_.erase(0, outcome.value().consumed);
  return std::optional<Message>{std::move(*outcome.value().message)};
}

}  // namespace socketstore::wire
