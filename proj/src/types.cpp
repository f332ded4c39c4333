#include "biasaudit/types.hpp"

#include <cctype>
#include <set>

#include "biasaudit/detail/strings.hpp"

namespace biasaudit {

std::string_view to_string(GoldLabel g) {
    switch (g) {
        case GoldLabel::stereotype: return "stereotype";
        case GoldLabel::anti_stereotype: return "anti_stereotype";
        case GoldLabel::unrelated: return "unrelated";
    }
    return "unrelated";
}

std::optional<GoldLabel> gold_label_from_string(std::string_view s) {
    if (s == "stereotype") return GoldLabel::stereotype;
    if (s == "anti_stereotype" || s == "anti-stereotype") return GoldLabel::anti_stereotype;
    if (s == "unrelated") return GoldLabel::unrelated;
    return std::nullopt;
}

std::optional<BiasCategory> BiasCategory::parse(std::string_view raw) {
    const std::string_view trimmed = detail::trim(raw);
    if (trimmed.empty()) return std::nullopt;
    for (char c : trimmed) {
        if (std::isspace(static_cast<unsigned char>(c))) return std::nullopt;
    }
    return BiasCategory{detail::to_lower(trimmed)};
}

std::string_view to_string(CorpusSource s) {
    switch (s) {
        case CorpusSource::stereoset: return "stereoset";
        case CorpusSource::crowspairs: return "crowspairs";
        case CorpusSource::custom: return "custom";
    }
    return "custom";
}

std::optional<CorpusSource> corpus_source_from_string(std::string_view s) {
    if (s == "stereoset") return CorpusSource::stereoset;
    if (s == "crowspairs") return CorpusSource::crowspairs;
    if (s == "custom") return CorpusSource::custom;
    return std::nullopt;
}

const Choice* McsbItem::choice_with_gold(GoldLabel g) const {
    for (const Choice& c : choices) {
        if (c.gold == g) return &c;
    }
    return nullptr;
}

std::optional<std::string> validate_item(const McsbItem& item) {
    if (item.id.empty()) return "empty item id";
    if (item.category.name.empty()) return "empty category";
    if (item.choices.size() < 2 || item.choices.size() > 3) {
        return "item must have 2 or 3 choices, got " + std::to_string(item.choices.size());
    }

    int stereotype = 0, anti = 0, unrelated = 0;
    std::set<std::string> texts;
    for (const Choice& c : item.choices) {
        if (detail::trim(c.text).empty()) return "empty choice text";
        if (!texts.insert(c.text).second) return "duplicate choice text";
        switch (c.gold) {
            case GoldLabel::stereotype: ++stereotype; break;
            case GoldLabel::anti_stereotype: ++anti; break;
            case GoldLabel::unrelated: ++unrelated; break;
        }
    }
    if (stereotype != 1) return "expected exactly one stereotype choice, got " + std::to_string(stereotype);
    if (anti != 1) return "expected exactly one anti_stereotype choice, got " + std::to_string(anti);
    const int want_unrelated = item.choices.size() == 3 ? 1 : 0;
    if (unrelated != want_unrelated) {
        return "expected " + std::to_string(want_unrelated) + " unrelated choice(s), got " +
               std::to_string(unrelated);
    }
    return std::nullopt;
}

}  // namespace biasaudit
