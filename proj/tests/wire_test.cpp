#include <doctest.h>

#include <random>
#include <vector>

#include "socketstore/wire/codec.hpp"

using namespace socketstore;

namespace {

wire::Message make_message(wire::MsgKind kind, std::int64_t correlation, core::Json body) {
  wire::Message m;
  m.kind = kind;
  m.correlation_id = correlation;
  m.body = std::move(body);
  return m;
}

std::uint32_t read_be32(const std::string& bytes) {
  return (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[0])) << 24) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[1])) << 16) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[2])) << 8) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[3]));
}

core::Json random_body(std::mt19937& rng, int depth = 0) {
  std::uniform_int_distribution<int> kind_dist(0, depth < 2 ? 5 : 3);
  std::uniform_int_distribution<int> len_dist(0, 6);
  std::uniform_int_distribution<int> char_dist(32, 126);
  std::uniform_int_distribution<std::int64_t> int_dist(-1'000'000, 1'000'000);
  auto random_string = [&] {
    std::string s;
    const int len = len_dist(rng);
    for (int i = 0; i < len; ++i) s.push_back(static_cast<char>(char_dist(rng)));
    return s;
  };
  switch (kind_dist(rng)) {
    case 0: return core::Json(int_dist(rng));
    case 1: return core::Json(random_string());
    case 2: return core::Json(kind_dist(rng) % 2 == 0);
    case 3: return core::Json(static_cast<double>(int_dist(rng)) / 16.0);
    case 4: {
      core::Json arr = core::Json::array();
      const int len = len_dist(rng);
      for (int i = 0; i < len; ++i) arr.push_back(random_body(rng, depth + 1));
      return arr;
    }
    default: {
      core::Json obj = core::Json::object();
      const int len = len_dist(rng);
      for (int i = 0; i < len; ++i) obj["k" + std::to_string(i) + random_string()] = random_body(rng, depth + 1);
      return obj;
    }
  }
}

const std::vector<wire::MsgKind> all_kinds{
    wire::MsgKind::hello,         wire::MsgKind::to_request,   wire::MsgKind::to_response,
    wire::MsgKind::open_session,  wire::MsgKind::session_opened, wire::MsgKind::data,
    wire::MsgKind::close_session, wire::MsgKind::session_closed, wire::MsgKind::subscribe,
    wire::MsgKind::event,         wire::MsgKind::sample,       wire::MsgKind::error};

}  // namespace

TEST_CASE("length prefix equals payload byte count") {
  auto msg = make_message(wire::MsgKind::error, 0, core::Json{{"code", "X"}});
  auto encoded = wire::encode_frame(msg);
  REQUIRE(encoded.ok());
  const auto& bytes = encoded.value();
  REQUIRE(bytes.size() > 4);
  CHECK(read_be32(bytes) == bytes.size() - 4);
}

TEST_CASE("round-trip of every message kind with empty bodies") {
  for (auto kind : all_kinds) {
    auto msg = make_message(kind, 7, core::Json::object());
    auto encoded = wire::encode_frame(msg);
    REQUIRE(encoded.ok());
    auto decoded = wire::decode_frame(encoded.value());
    REQUIRE(decoded.ok());
    REQUIRE_FALSE(decoded.value().need_more());
    CHECK(*decoded.value().message == msg);
    CHECK(decoded.value().consumed == encoded.value().size());
  }
}

TEST_CASE("oversize payload is rejected") {
  wire::Message msg;
  msg.kind = wire::MsgKind::data;
  msg.body = core::Json{{"payload", std::string(wire::max_frame_payload + 1, 'x')}};
  CHECK(wire::encode_frame(msg).code() == core::Errc::frame_too_large);
}

TEST_CASE("declared length exceeding the bound is a protocol error") {
  std::string bytes{'\xff', '\xff', '\xff', '\xff'};
  bytes.append("junk");
  CHECK(wire::decode_frame(bytes).code() == core::Errc::protocol_error);
}

TEST_CASE("buffer with two concatenated frames yields first plus intact remainder") {
  auto first = wire::encode_frame(make_message(wire::MsgKind::hello, 1, {{"protocol_version", 1}}));
  auto second = wire::encode_frame(make_message(wire::MsgKind::data, 2, {{"payload", "abc"}}));
  REQUIRE(first.ok());
  REQUIRE(second.ok());
  std::string buffer = first.value() + second.value();
  auto outcome = wire::decode_frame(buffer);
  REQUIRE(outcome.ok());
  REQUIRE_FALSE(outcome.value().need_more());
  CHECK(outcome.value().message->kind == wire::MsgKind::hello);
  CHECK(buffer.substr(outcome.value().consumed) == second.value());
}

TEST_CASE("three-byte buffer needs more bytes") {
  auto outcome = wire::decode_frame(std::string("\x00\x00\x01", 3));
  REQUIRE(outcome.ok());
  CHECK(outcome.value().need_more());
}

TEST_CASE("valid length prefix with non-JSON payload is a protocol error") {
  std::string bytes{'\x00', '\x00', '\x00', '\x04'};
  bytes.append("not{");
  CHECK(wire::decode_frame(bytes).code() == core::Errc::protocol_error);
}

TEST_CASE("codec round-trip identity over randomized messages") {
  std::mt19937 rng(42);
  std::uniform_int_distribution<int> kind_pick(0, static_cast<int>(all_kinds.size()) - 1);
  std::uniform_int_distribution<std::int64_t> corr(0, 1 << 30);
  for (int i = 0; i < 500; ++i) {
    core::Json body = core::Json::object();
    body["payload"] = random_body(rng);
    auto msg = make_message(all_kinds[kind_pick(rng)], corr(rng), body);
    auto encoded = wire::encode_frame(msg);
    REQUIRE(encoded.ok());
    auto decoded = wire::decode_frame(encoded.value());
    REQUIRE(decoded.ok());
    REQUIRE_FALSE(decoded.value().need_more());
    CHECK(*decoded.value().message == msg);
  }
}

TEST_CASE("any chunking of a valid stream decodes to the same sequence") {
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> kind_pick(0, static_cast<int>(all_kinds.size()) - 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<wire::Message> sent;
    std::string stream;
    std::uniform_int_distribution<int> count_dist(1, 6);
    const int count = count_dist(rng);
    for (int i = 0; i < count; ++i) {
      auto msg = make_message(all_kinds[kind_pick(rng)], i, core::Json{{"v", random_body(rng)}});
      sent.push_back(msg);
      stream += wire::encode_frame(msg).value();
    }
    wire::FrameDecoder decoder;
    std::vector<wire::Message> received;
    std::size_t pos = 0;
    std::uniform_int_distribution<std::size_t> chunk_dist(1, 7);
    while (pos < stream.size()) {
      const std::size_t len = std::min(chunk_dist(rng), stream.size() - pos);
      decoder.feed(std::string_view(stream).substr(pos, len));
      pos += len;
      while (true) {
        auto next = decoder.next();
        REQUIRE(next.ok());
        if (!next.value().has_value()) break;
        received.push_back(*next.value());
      }
    }
    CHECK(received == sent);
  }
}

TEST_CASE("malformed frames never crash the decoder") {
  std::mt19937 rng(1234);
  std::uniform_int_distribution<int> len_dist(0, 64);
  std::uniform_int_distribution<int> byte_dist(0, 255);
  int errors = 0;
  for (int i = 0; i < 2000; ++i) {
    std::string junk;
    const int len = len_dist(rng);
    for (int b = 0; b < len; ++b) junk.push_back(static_cast<char>(byte_dist(rng)));
    auto outcome = wire::decode_frame(junk);
    if (!outcome.ok()) {
      CHECK(outcome.code() == core::Errc::protocol_error);
      ++errors;
    }
  }
  CHECK(errors > 0);
}

TEST_CASE("every request kind has exactly one response kind") {
  CHECK(wire::response_kind_for(wire::MsgKind::hello) == wire::MsgKind::hello);
  CHECK(wire::response_kind_for(wire::MsgKind::to_request) == wire::MsgKind::to_response);
  CHECK(wire::response_kind_for(wire::MsgKind::open_session) == wire::MsgKind::session_opened);
  CHECK(wire::response_kind_for(wire::MsgKind::data) == wire::MsgKind::data);
  CHECK(wire::response_kind_for(wire::MsgKind::close_session) == wire::MsgKind::session_closed);
  CHECK(wire::response_kind_for(wire::MsgKind::subscribe) == wire::MsgKind::subscribe);
  CHECK(wire::response_kind_for(wire::MsgKind::sample) == wire::MsgKind::sample);
}
