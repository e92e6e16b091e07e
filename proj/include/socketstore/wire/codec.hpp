#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <string>
#include <string_view>

#include "socketstore/core/result.hpp"
#include "socketstore/wire/message.hpp"

namespace socketstore::wire {

// Frame layout: 4-byte big-endian payload length, then that many bytes of
// canonical JSON. Payloads above the bound are rejected on both sides.
inline constexpr std::size_t max_frame_payload = 16u * 1024u * 1024u;

core::Result<std::string> encode_frame(const Message& msg);

// Outcome of decoding the front of a buffer. message is empty while the
// buffer holds only a partial frame; consumed is the byte count to drop.
struct DecodeOutcome {
  std::optional<Message> message;
  std::size_t consumed = 0;

  bool need_more() const { return !message.has_value(); }
};

core::Result<DecodeOutcome> decode_frame(std::string_view buffer);

// Incremental decoder for a byte stream; owns the partial-frame buffer.
class FrameDecoder {
 public:
  void feed(std::string_view bytes) { buffer_.append(bytes); }

  // Returns the next complete message, nullopt when more bytes are needed,
  // or ProtocolError; the stream is unusable after an error.
  core::Result<std::optional<Message>> next();

  std::size_t buffered() const { return buffer_.size(); }

 private:
  std::string buffer_;
};

}  // namespace socketstore::wire
