#pragma once

#include <string>
#include <string_view>

namespace socketstore::core {

std::string sha256_hex(std::string_view data);

// Keyed tag used for entitlement tokens.
std::string hmac_sha256_hex(std::string_view key, std::string_view data);

// Constant-time comparison of two hex tags.
bool digest_equal(std::string_view a, std::string_view b);

}  // namespace socketstore::core
