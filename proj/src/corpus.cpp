#include "biasaudit/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "biasaudit/detail/csv.hpp"
#include "biasaudit/detail/io.hpp"
#include "biasaudit/detail/rng.hpp"
#include "biasaudit/detail/strings.hpp"

namespace biasaudit {

using nlohmann::json;

std::string_view to_string(StereosetPortion p) {
    switch (p) {
        case StereosetPortion::intersentence: return "intersentence";
        case StereosetPortion::intrasentence: return "intrasentence";
        case StereosetPortion::both: return "both";
    }
    return "both";
}

std::optional<StereosetPortion> stereoset_portion_from_string(std::string_view s) {
    if (s == "intersentence") return StereosetPortion::intersentence;
    if (s == "intrasentence") return StereosetPortion::intrasentence;
    if (s == "both") return StereosetPortion::both;
    return std::nullopt;
}

namespace {

void load_stereoset_portion(const json& entries, std::string_view portion_name,
                            const std::string& file_tag, LoadResult& out) {
    std::size_t index = 0;
    for (const json& entry : entries) {
        const std::string location =
            file_tag + ":" + std::string(portion_name) + "[" + std::to_string(index) + "]";
        ++index;

        if (!entry.is_object()) {
            out.rejects.push_back({location, "entry is not an object"});
            continue;
        }

        McsbItem item;
        item.source = CorpusSource::stereoset;

        std::string entry_id = std::to_string(index - 1);
        if (entry.contains("id") && entry["id"].is_string()) entry_id = entry["id"].get<std::string>();
        item.id = "stereoset:" + std::string(portion_name) + ":" + entry_id;

        if (!entry.contains("bias_type") || !entry["bias_type"].is_string()) {
            out.rejects.push_back({location, "missing bias_type"});
            continue;
        }
        auto category = BiasCategory::parse(entry["bias_type"].get<std::string>());
        if (!category) {
            out.rejects.push_back({location, "malformed bias_type: " + entry["bias_type"].dump()});
            continue;
        }
        item.category = *category;

        if (entry.contains("context") && entry["context"].is_string()) {
            std::string context = entry["context"].get<std::string>();
            if (!detail::trim(context).empty()) item.context = std::move(context);
        }

        if (!entry.contains("sentences") || !entry["sentences"].is_array()) {
            out.rejects.push_back({location, "missing sentences list"});
            continue;
        }
        bool sentence_ok = true;
        for (const json& sent : entry["sentences"]) {
            if (!sent.is_object() || !sent.contains("sentence") || !sent["sentence"].is_string() ||
                !sent.contains("gold_label") || !sent["gold_label"].is_string()) {
                out.rejects.push_back({location, "sentence missing text or gold label"});
                sentence_ok = false;
                break;
            }
            const auto gold = gold_label_from_string(sent["gold_label"].get<std::string>());
            if (!gold) {
                out.rejects.push_back(
                    {location, "unknown gold label: " + sent["gold_label"].get<std::string>()});
                sentence_ok = false;
                break;
            }
            item.choices.push_back({sent["sentence"].get<std::string>(), *gold});
        }
        if (!sentence_ok) continue;

        if (auto reason = validate_item(item)) {
            out.rejects.push_back({location, *reason});
            continue;
        }
        out.items.push_back(std::move(item));
    }
}

}  // namespace

LoadResult load_stereoset(const std::filesystem::path& path, StereosetPortion portion) {
    const std::string raw = detail::read_file(path);
    json doc;
    try {
        doc = json::parse(raw);
    } catch (const json::parse_error& e) {
        throw format_error(path.string() + ": malformed JSON at byte " + std::to_string(e.byte) +
                           ": " + e.what());
    }

    if (!doc.is_object() || !doc.contains("data") || !doc["data"].is_object()) {
        throw format_error(path.string() + ": expected top-level \"data\" object");
    }
    const json& data = doc["data"];
    const std::string file_tag = path.filename().string();

    LoadResult out;
    const bool want_inter =
        portion == StereosetPortion::intersentence || portion == StereosetPortion::both;
    const bool want_intra =
        portion == StereosetPortion::intrasentence || portion == StereosetPortion::both;
    if (want_inter && data.contains("intersentence")) {
        load_stereoset_portion(data["intersentence"], "intersentence", file_tag, out);
    }
    if (want_intra && data.contains("intrasentence")) {
        load_stereoset_portion(data["intrasentence"], "intrasentence", file_tag, out);
    }
    return out;
}

namespace {

// CrowS-Pairs bias_type -> canonical category. The benchmark's nine types.
const std::map<std::string, std::string>& crowspairs_category_map() {
    static const std::map<std::string, std::string> m = {
        {"race-color", "race"},
        {"gender", "gender"},
        {"socioeconomic", "socioeconomic"},
        {"nationality", "nationality"},
        {"religion", "religion"},
        {"age", "age"},
        {"sexual-orientation", "sexual-orientation"},
        {"physical-appearance", "physical-appearance"},
        {"disability", "disability"},
    };
    return m;
}

}  // namespace

LoadResult load_crowspairs(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw format_error("cannot open file: " + path.string());

    detail::CsvReader reader(in);
    const auto header = reader.next();
    if (!header) throw format_error(path.string() + ": empty CSV");

    const auto column = [&](std::string_view name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < header->size(); ++i) {
            if (detail::trim((*header)[i]) == name) return i;
        }
        return std::nullopt;
    };
    const auto col_more = column("sent_more");
    const auto col_less = column("sent_less");
    const auto col_dir = column("stereo_antistereo");
    const auto col_type = column("bias_type");
    if (!col_more || !col_less || !col_dir || !col_type) {
        throw format_error(path.string() +
                           ": header must contain sent_more, sent_less, stereo_antistereo, bias_type");
    }
    const std::size_t min_fields = std::max({*col_more, *col_less, *col_dir, *col_type}) + 1;

    LoadResult out;
    const std::string file_tag = path.filename().string();
    std::size_t row_index = 0;
    while (auto row = reader.next()) {
        const std::string location = file_tag + ":row " + std::to_string(row_index);
        const std::size_t this_row = row_index++;

        if (row->size() == 1 && detail::trim((*row)[0]).empty()) continue;  // trailing blank line
        if (row->size() < min_fields) {
            out.rejects.push_back({location, "row has too few fields"});
            continue;
        }

        const std::string direction = std::string(detail::trim((*row)[*col_dir]));
        if (direction != "stereo" && direction != "antistereo") {
            out.rejects.push_back({location, "unknown stereo_antistereo value: " + direction});
            continue;
        }

        const std::string raw_type = std::string(detail::trim((*row)[*col_type]));
        const auto& cat_map = crowspairs_category_map();
        const auto cat_it = cat_map.find(raw_type);
        if (cat_it == cat_map.end()) {
            out.rejects.push_back({location, "unknown bias_type: " + raw_type});
            continue;
        }

        McsbItem item;
        item.source = CorpusSource::crowspairs;
        item.id = "crowspairs:" + std::to_string(this_row);
        item.category = BiasCategory{cat_it->second};

        // sent_more is the more-stereotypical sentence only when the pair
        // direction is "stereo"; normalize so gold=stereotype always marks
        // the stereotypical text.
        const std::string& sent_more = (*row)[*col_more];
        const std::string& sent_less = (*row)[*col_less];
        if (direction == "stereo") {
            item.choices = {{sent_more, GoldLabel::stereotype}, {sent_less, GoldLabel::anti_stereotype}};
        } else {
            item.choices = {{sent_less, GoldLabel::stereotype}, {sent_more, GoldLabel::anti_stereotype}};
        }

        if (auto reason = validate_item(item)) {
            out.rejects.push_back({location, *reason});
            continue;
        }
        out.items.push_back(std::move(item));
    }
    return out;
}

std::vector<McsbItem> filter_items(std::span<const McsbItem> items,
                                   const std::set<BiasCategory>& categories) {
    std::vector<McsbItem> out;
    out.reserve(items.size());
    for (const McsbItem& item : items) {
        if (categories.empty() || categories.contains(item.category)) out.push_back(item);
    }
    return out;
}

SplitResult split_train_test(std::span<const McsbItem> items, const SplitSpec& spec) {
    if (spec.per_category_train < 1) throw precondition_error("per_category_train must be >= 1");

    std::map<BiasCategory, std::vector<std::size_t>> by_category;
    for (std::size_t i = 0; i < items.size(); ++i) {
        by_category[items[i].category].push_back(i);
    }
    for (const auto& [category, indices] : by_category) {
        if (indices.size() < spec.per_category_train + 1) {
            throw precondition_error("category \"" + category.name + "\" has " +
                                     std::to_string(indices.size()) + " items, need at least " +
                                     std::to_string(spec.per_category_train + 1) +
                                     " for a train/test split of " +
                                     std::to_string(spec.per_category_train));
        }
    }

    std::vector<bool> in_train(items.size(), false);
    for (const auto& [category, indices] : by_category) {
        // Category-local stream keyed on (seed, category name) so draws do
        // not depend on which other categories are present.
        auto rng = detail::seeded_rng(spec.seed ^ detail::fnv1a(category.name));
        std::vector<int> order(indices.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        detail::fisher_yates(order, rng);
        for (std::size_t i = 0; i < spec.per_category_train; ++i) {
            in_train[indices[static_cast<std::size_t>(order[i])]] = true;
        }
    }

    SplitResult out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        (in_train[i] ? out.train : out.test).push_back(items[i]);
    }
    return out;
}

std::string item_to_json_line(const McsbItem& item) {
    json j;
    j["id"] = item.id;
    j["source"] = to_string(item.source);
    j["category"] = item.category.name;
    if (item.context) j["context"] = *item.context;
    json choices = json::array();
    for (const Choice& c : item.choices) {
        choices.push_back({{"text", c.text}, {"gold", std::string(to_string(c.gold))}});
    }
    j["choices"] = std::move(choices);
    return j.dump();
}

McsbItem item_from_json_line(std::string_view line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw format_error(std::string("malformed item line: ") + e.what());
    }
    McsbItem item;
    item.id = j.at("id").get<std::string>();
    const auto source = corpus_source_from_string(j.at("source").get<std::string>());
    if (!source) throw format_error("unknown source in item line: " + j["source"].dump());
    item.source = *source;
    const auto category = BiasCategory::parse(j.at("category").get<std::string>());
    if (!category) throw format_error("malformed category in item line: " + j["category"].dump());
    item.category = *category;
    if (j.contains("context") && j["context"].is_string()) {
        item.context = j["context"].get<std::string>();
    }
    for (const json& c : j.at("choices")) {
        const auto gold = gold_label_from_string(c.at("gold").get<std::string>());
        if (!gold) throw format_error("unknown gold label in item line: " + c["gold"].dump());
        item.choices.push_back({c.at("text").get<std::string>(), *gold});
    }
    if (auto reason = validate_item(item)) {
        throw format_error("invalid item " + item.id + ": " + *reason);
    }
    return item;
}

void write_items(const std::filesystem::path& path, std::span<const McsbItem> items) {
    std::string buf;
    for (const McsbItem& item : items) {
        buf += item_to_json_line(item);
        buf += '\n';
    }
    detail::write_file_atomic(path, buf);
}

std::vector<McsbItem> read_items(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw format_error("cannot open items file: " + path.string());
    std::vector<McsbItem> items;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        try {
            items.push_back(item_from_json_line(line));
        } catch (const format_error& e) {
            throw format_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return items;
}

void write_rejects(const std::filesystem::path& path, std::span<const Reject> rejects) {
    std::string buf;
    for (const Reject& r : rejects) {
        json j;
        j["source_location"] = r.source_location;
        j["reason"] = r.reason;
        buf += j.dump();
        buf += '\n';
    }
    detail::write_file_atomic(path, buf);
}

}  // namespace biasaudit
