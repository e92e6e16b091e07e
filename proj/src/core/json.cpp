#include "socketstore/core/json.hpp"

namespace socketstore::core {

Result<Json> parse_json(std::string_view text) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    return Error{Errc::protocol_error, "malformed JSON"};
  }
  return j;
}

}  // namespace socketstore::core
