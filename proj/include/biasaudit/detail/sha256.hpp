#pragma once

#include <string>
#include <string_view>

namespace biasaudit::detail {

// FIPS 180-4 SHA-256, returned as a 64-char lowercase hex string.
std::string sha256_hex(std::string_view data);

}  // namespace biasaudit::detail
