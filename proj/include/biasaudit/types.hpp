#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace biasaudit {

// Error taxonomy. Validation problems in crowdsourced rows are *not* thrown;
// they are collected into rejects reports (see corpus.hpp). These exceptions
// cover unrecoverable conditions only.
struct format_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct precondition_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct transport_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct protocol_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class GoldLabel { stereotype, anti_stereotype, unrelated };

std::string_view to_string(GoldLabel g);
// Accepts "anti-stereotype" (benchmark spelling) as well as "anti_stereotype".
std::optional<GoldLabel> gold_label_from_string(std::string_view s);

// A bias category token: nonempty, lowercase, no whitespace ("race",
// "physical-appearance", ...). The canonical set is open-ended; loaders map
// source-specific names onto it.
struct BiasCategory {
    std::string name;

    auto operator<=>(const BiasCategory&) const = default;

    // Validates and normalizes (lowercases) a raw token. Returns nullopt for
    // empty tokens or tokens containing whitespace.
    static std::optional<BiasCategory> parse(std::string_view raw);
};

enum class CorpusSource { stereoset, crowspairs, custom };

std::string_view to_string(CorpusSource s);
std::optional<CorpusSource> corpus_source_from_string(std::string_view s);

struct Choice {
    std::string text;
    GoldLabel gold = GoldLabel::stereotype;

    bool operator==(const Choice&) const = default;
};

// One normalized multiple-choice bias question.
struct McsbItem {
    std::string id;
    CorpusSource source = CorpusSource::custom;
    BiasCategory category;
    std::optional<std::string> context;
    std::vector<Choice> choices;  // 2 or 3, see validate_item

    bool operator==(const McsbItem&) const = default;

    const Choice* choice_with_gold(GoldLabel g) const;
};

// Returns a reason string if the item violates its invariants:
//   - 2 <= |choices| <= 3, pairwise-distinct nonempty texts
//   - exactly one stereotype and one anti_stereotype choice
//   - exactly one unrelated choice iff |choices| == 3
// Returns nullopt for a well-formed item.
std::optional<std::string> validate_item(const McsbItem& item);

struct SplitSpec {
    std::size_t per_category_train = 1;
    std::uint64_t seed = 0;
};

}  // namespace biasaudit
