#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace biasaudit::detail {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
bool is_ascii_alnum(char c);

// Splits on a single-character delimiter; no quoting, keeps empty fields.
std::vector<std::string> split(std::string_view s, char delim);

// Two-decimal fixed rendering: 0.479 -> "0.48".
std::string format_ratio(double v);
// Signed two-decimal rendering: 0.39 -> "+0.39", -0.02 -> "-0.02".
std::string format_delta(double v);
// Full-precision shortest round-trip rendering for data formats.
std::string format_full(double v);

}  // namespace biasaudit::detail
