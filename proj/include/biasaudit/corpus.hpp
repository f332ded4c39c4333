#pragma once

#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "biasaudit/types.hpp"

namespace biasaudit {

// A record that failed validation during ingestion. Ingestion never aborts on
// bad rows; it reports them.
struct Reject {
    std::string source_location;  // e.g. "dev.json:intersentence[12]" or "crows.csv:row 7"
    std::string reason;
};

struct LoadResult {
    std::vector<McsbItem> items;
    std::vector<Reject> rejects;
};

enum class StereosetPortion { intersentence, intrasentence, both };

std::string_view to_string(StereosetPortion p);
std::optional<StereosetPortion> stereoset_portion_from_string(std::string_view s);

// Loads a StereoSet-layout JSON file (top-level "data" object holding
// "intersentence"/"intrasentence" entry lists). Each entry becomes one
// 3-choice item with id "stereoset:<portion>:<entry id>". Intrasentence
// entries keep their BLANK-templated context; choices are the filled
// sentences. Throws format_error (with byte offset) on malformed JSON;
// per-entry problems land in rejects.
LoadResult load_stereoset(const std::filesystem::path& path, StereosetPortion portion);

// Loads a CrowS-Pairs-layout CSV (columns sent_more, sent_less,
// stereo_antistereo, bias_type located by header). Rows become 2-choice
// context-free items with id "crowspairs:<row index>". The sentence
// expressing the stereotype always carries gold=stereotype, regardless of the
// row's direction flag.
LoadResult load_crowspairs(const std::filesystem::path& path);

// Order-preserving category filter; an empty set filters nothing.
std::vector<McsbItem> filter_items(std::span<const McsbItem> items,
                                   const std::set<BiasCategory>& categories);

struct SplitResult {
    std::vector<McsbItem> train;
    std::vector<McsbItem> test;
};

// Draws spec.per_category_train items per category into train (seeded,
// deterministic); everything else goes to test. Both halves preserve the
// original relative order. Throws precondition_error if any category has
// fewer than per_category_train + 1 items.
SplitResult split_train_test(std::span<const McsbItem> items, const SplitSpec& spec);

// Normalized item files: UTF-8, one JSON object per line with fields
// {id, source, category, context, choices:[{text, gold}]}.
std::string item_to_json_line(const McsbItem& item);
McsbItem item_from_json_line(std::string_view line);
void write_items(const std::filesystem::path& path, std::span<const McsbItem> items);
std::vector<McsbItem> read_items(const std::filesystem::path& path);

// Rejects report: one JSON object per line with {source_location, reason}.
void write_rejects(const std::filesystem::path& path, std::span<const Reject> rejects);

}  // namespace biasaudit
