#pragma once

#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace biasaudit::detail {

// RFC 4180-style reader: quoted fields may contain commas, doubled quotes,
// and embedded newlines. Handles CRLF and a missing trailing newline.
class CsvReader {
public:
    explicit CsvReader(std::istream& in) : in_(in) {}

    // Reads one record; nullopt at end of input.
    std::optional<std::vector<std::string>> next();

private:
    std::istream& in_;
};

}  // namespace biasaudit::detail
