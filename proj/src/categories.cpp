#include "biasaudit/categories.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace biasaudit {

std::vector<BiasCategory> canonical_category_order(const std::vector<BiasCategory>& present) {
    static constexpr std::array<std::string_view, 4> head = {"gender", "race", "profession",
                                                             "religion"};
    std::vector<BiasCategory> out;
    std::vector<BiasCategory> rest;
    for (std::string_view name : head) {
        for (const BiasCategory& c : present) {
            if (c.name == name) out.push_back(c);
        }
    }
    for (const BiasCategory& c : present) {
        if (std::find(head.begin(), head.end(), c.name) == head.end()) rest.push_back(c);
    }
    std::sort(rest.begin(), rest.end());
    rest.erase(std::unique(rest.begin(), rest.end()), rest.end());
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
}

std::string display_name(const BiasCategory& category) {
    if (category.name == "age") return "Age Status";
    if (category.name == "socioeconomic") return "Socioeconomic Status";

    std::string out;
    bool upper_next = true;
    for (char c : category.name) {
        if (c == '-' || c == '_') {
            out += ' ';
            upper_next = true;
        } else {
            out += upper_next ? static_cast<char>(std::toupper(static_cast<unsigned char>(c))) : c;
            upper_next = false;
        }
    }
    return out;
}

}  // namespace biasaudit
