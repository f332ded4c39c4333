#include "biasaudit/detail/csv.hpp"

namespace biasaudit::detail {

std::optional<std::vector<std::string>> CsvReader::next() {
    if (in_.peek() == std::char_traits<char>::eof()) return std::nullopt;

    std::vector<std::string> fields;
    std::string cur;
    bool in_quotes = false;
    char c;
    while (in_.get(c)) {
        if (in_quotes) {
            if (c == '"') {
                if (in_.peek() == '"') {
                    in_.get(c);
                    cur.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                cur.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                in_quotes = true;
                break;
            case ',':
                fields.push_back(std::move(cur));
                cur.clear();
                break;
            case '\r':
                if (in_.peek() == '\n') in_.get(c);
                [[fallthrough]];
            case '\n':
                fields.push_back(std::move(cur));
                return fields;
            default:
                cur.push_back(c);
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

}  // namespace biasaudit::detail
