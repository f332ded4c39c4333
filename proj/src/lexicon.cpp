#include "biasaudit/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_map>

#include "biasaudit/categories.hpp"
#include "biasaudit/detail/strings.hpp"

namespace biasaudit {

using nlohmann::json;

const std::set<std::string>& default_stopwords() {
    static const std::set<std::string> words = {
        // determiners & demonstratives
        "an", "the", "this", "that", "these", "those", "each", "some", "any", "both", "such",
        "same", "other",
        // pronouns
        "me", "my", "mine", "myself", "you", "your", "yours", "yourself", "he", "him", "his",
        "himself", "she", "her", "hers", "herself", "it", "its", "itself", "we", "us", "our",
        "ours", "ourselves", "they", "them", "their", "theirs", "themselves", "who", "whom",
        "whose", "which", "what",
        // conjunctions
        "and", "or", "but", "nor", "if", "because", "while", "although", "though", "whether",
        // prepositions
        "of", "in", "on", "at", "by", "for", "with", "without", "about", "against", "between",
        "among", "into", "through", "during", "before", "after", "above", "below", "to", "from",
        "up", "down", "out", "off", "over", "under", "upon",
        // be / have / do
        "is", "am", "are", "was", "were", "be", "been", "being", "have", "has", "had", "having",
        "do", "does", "did", "doing",
        // particles & connective adverbs
        "not", "no", "as", "than", "then", "there", "here", "when", "where", "why", "how",
        "again", "once", "too", "very", "also", "just", "so",
    };
    return words;
}

std::vector<std::string> tokenize(std::string_view text) {
    return tokenize(text, default_stopwords());
}

std::vector<std::string> tokenize(std::string_view text, const std::set<std::string>& stopwords) {
    std::vector<std::string> out;
    std::string cur;
    const auto flush = [&] {
        if (cur.size() >= 2 && !stopwords.contains(cur)) out.push_back(cur);
        cur.clear();
    };
    for (char c : text) {
        if (detail::is_ascii_alnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else {
            flush();
        }
    }
    flush();
    return out;
}

void TokenCorpus::add_selected(std::span<const std::string> tokens) {
    for (const std::string& t : tokens) {
        ++class_s[t];
        ++total_s;
        vocabulary.insert(t);
    }
}

void TokenCorpus::add_rejected(std::span<const std::string> tokens) {
    for (const std::string& t : tokens) {
        ++class_n[t];
        ++total_n;
        vocabulary.insert(t);
    }
}

TokenCorpus merge_corpora(const std::map<BiasCategory, TokenCorpus>& per_category) {
    TokenCorpus merged;
    for (const auto& [category, corpus] : per_category) {
        for (const auto& [token, count] : corpus.class_s) {
            merged.class_s[token] += count;
            merged.total_s += count;
        }
        for (const auto& [token, count] : corpus.class_n) {
            merged.class_n[token] += count;
            merged.total_n += count;
        }
        merged.vocabulary.insert(corpus.vocabulary.begin(), corpus.vocabulary.end());
    }
    return merged;
}

std::map<BiasCategory, TokenCorpus> build_token_corpus(std::span<const EvalRecord> records,
                                                       std::span<const McsbItem> items,
                                                       PromptMode mode_rule) {
    std::unordered_map<std::string_view, const McsbItem*> by_id;
    by_id.reserve(items.size());
    for (const McsbItem& item : items) by_id.emplace(item.id, &item);

    std::map<BiasCategory, TokenCorpus> out;
    for (const EvalRecord& record : records) {
        if (record.mode != mode_rule) continue;
        if (record.parsed.unparseable()) continue;

        const auto it = by_id.find(record.item_id);
        if (it == by_id.end()) {
            throw precondition_error("record references unknown item: " + record.item_id);
        }
        const McsbItem& item = *it->second;

        const std::size_t position = static_cast<std::size_t>(*record.parsed.symbol - 'A');
        if (position >= record.permutation.size()) {
            throw precondition_error("record symbol out of range for item: " + record.item_id);
        }
        const int selected = record.permutation[position];

        TokenCorpus& corpus = out[item.category];
        for (std::size_t i = 0; i < item.choices.size(); ++i) {
            const auto tokens = tokenize(item.choices[i].text);
            if (static_cast<int>(i) == selected) {
                corpus.add_selected(tokens);
            } else {
                corpus.add_rejected(tokens);
            }
        }
    }
    return out;
}

double log_odds_score(const std::string& token, const TokenCorpus& corpus, double alpha) {
    if (alpha <= 0.0) throw precondition_error("alpha must be positive");
    const double v = static_cast<double>(corpus.vocabulary.size());
    if (v == 0.0) return 0.0;

    const auto count_in = [&](const std::map<std::string, std::int64_t>& counts) {
        const auto it = counts.find(token);
        return it == counts.end() ? std::int64_t{0} : it->second;
    };
    const double cs = static_cast<double>(count_in(corpus.class_s));
    const double cn = static_cast<double>(count_in(corpus.class_n));
    const double ns = static_cast<double>(corpus.total_s);
    const double nn = static_cast<double>(corpus.total_n);
    return std::log((cs + alpha) / (ns + alpha * v)) - std::log((cn + alpha) / (nn + alpha * v));
}

namespace {

DirectionLists rank_directions(const TokenCorpus& corpus, int k, double alpha) {
    std::vector<ScoredToken> scored;
    scored.reserve(corpus.vocabulary.size());
    for (const std::string& token : corpus.vocabulary) {
        scored.push_back({token, log_odds_score(token, corpus, alpha)});
    }

    const auto take = [&](auto cmp) {
        auto ranked = scored;
        std::sort(ranked.begin(), ranked.end(), cmp);
        if (ranked.size() > static_cast<std::size_t>(k)) ranked.resize(static_cast<std::size_t>(k));
        return ranked;
    };

    DirectionLists lists;
    lists.toward_stereotype = take([](const ScoredToken& a, const ScoredToken& b) {
        return a.score != b.score ? a.score > b.score : a.token < b.token;
    });
    lists.away_from_stereotype = take([](const ScoredToken& a, const ScoredToken& b) {
        return a.score != b.score ? a.score < b.score : a.token < b.token;
    });
    for (ScoredToken& t : lists.away_from_stereotype) t.score = -t.score;
    return lists;
}

}  // namespace

LexiconReport build_lexicon_report(std::span<const EvalRecord> records,
                                   std::span<const McsbItem> items, PromptMode mode_rule, int k,
                                   double alpha) {
    if (k < 1) throw precondition_error("k must be >= 1");

    const auto corpora = build_token_corpus(records, items, mode_rule);
    LexiconReport report;
    report.k = k;
    report.alpha = alpha;
    for (const auto& [category, corpus] : corpora) {
        report.per_category[category] = rank_directions(corpus, k, alpha);
    }
    report.overall = rank_directions(merge_corpora(corpora), k, alpha);
    return report;
}

namespace {

json lists_to_json(const DirectionLists& lists) {
    const auto dump = [](const std::vector<ScoredToken>& tokens) {
        json arr = json::array();
        for (const ScoredToken& t : tokens) arr.push_back({{"token", t.token}, {"score", t.score}});
        return arr;
    };
    return {{"toward_stereotype", dump(lists.toward_stereotype)},
            {"away_from_stereotype", dump(lists.away_from_stereotype)}};
}

std::string quoted_words(const std::vector<ScoredToken>& tokens) {
    std::string out;
    for (const ScoredToken& t : tokens) {
        if (!out.empty()) out += ", ";
        out += "'" + t.token + "'";
    }
    return out;
}

}  // namespace

json lexicon_to_json(const LexiconReport& report) {
    json out;
    out["k"] = report.k;
    out["alpha"] = report.alpha;
    out["overall"] = lists_to_json(report.overall);
    json categories = json::object();
    for (const auto& [category, lists] : report.per_category) {
        categories[category.name] = lists_to_json(lists);
    }
    out["categories"] = std::move(categories);
    return out;
}

std::string lexicon_to_markdown(const LexiconReport& report) {
    std::vector<BiasCategory> present;
    for (const auto& [category, lists] : report.per_category) present.push_back(category);
    const auto order = canonical_category_order(present);

    const auto block = [&](std::string_view title,
                           const std::vector<ScoredToken> DirectionLists::* member) {
        std::string out = "| | " + std::string(title) + " |\n| --- | --- |\n";
        out += "| All | " + quoted_words(report.overall.*member) + " |\n";
        for (const BiasCategory& category : order) {
            out += "| " + display_name(category) + " | " +
                   quoted_words(report.per_category.at(category).*member) + " |\n";
        }
        return out;
    };

    const std::string k = std::to_string(report.k);
    return block("Top " + k + " words helped decide it wasn't stereotype",
                 &DirectionLists::away_from_stereotype) +
           "\n" +
           block("Top " + k + " words helped decide it was stereotype",
                 &DirectionLists::toward_stereotype);
}

}  // namespace biasaudit
