#pragma once

#include <json.hpp>

#include <string>

#include "socketstore/core/result.hpp"

namespace socketstore::core {

// nlohmann::json with the default std::map object backend keeps object keys
// lexicographically sorted, which is what the canonical serialization relies
// on. Checksums and entitlement tokens are computed over canonical_dump().
using Json = nlohmann::json;

inline std::string canonical_dump(const Json& j) { return j.dump(); }

// Parse that reports Errc::protocol_error instead of throwing.
Result<Json> parse_json(std::string_view text);

}  // namespace socketstore::core
