#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "biasaudit/evaluator.hpp"
#include "biasaudit/types.hpp"

namespace biasaudit {

// The shipped stopword list (function words only; content-bearing words like
// "always", "must", or "like" stay in). Also written out verbatim as
// docs/stopwords.txt.
const std::set<std::string>& default_stopwords();

// Case-folds, splits on non-alphanumeric runs, drops stopwords and
// single-character tokens.
std::vector<std::string> tokenize(std::string_view text);
std::vector<std::string> tokenize(std::string_view text, const std::set<std::string>& stopwords);

// Token tallies for the two decision classes: texts the model picked as the
// stereotype (class_s) vs. everything it passed over (class_n).
struct TokenCorpus {
    std::map<std::string, std::int64_t> class_s;
    std::map<std::string, std::int64_t> class_n;
    std::int64_t total_s = 0;
    std::int64_t total_n = 0;
    std::set<std::string> vocabulary;

    void add_selected(std::span<const std::string> tokens);
    void add_rejected(std::span<const std::string> tokens);
};

TokenCorpus merge_corpora(const std::map<BiasCategory, TokenCorpus>& per_category);

// For each parseable record of the given mode, the selected choice's text
// feeds class_s and every non-selected choice's text feeds class_n. A record
// referencing an unknown item throws.
std::map<BiasCategory, TokenCorpus> build_token_corpus(std::span<const EvalRecord> records,
                                                       std::span<const McsbItem> items,
                                                       PromptMode mode_rule);

// Smoothed multinomial log-odds:
//   log[(c_s(w)+a)/(N_s+aV)] - log[(c_n(w)+a)/(N_n+aV)]
// Out-of-vocabulary tokens score with c_s = c_n = 0; an empty corpus scores 0.
double log_odds_score(const std::string& token, const TokenCorpus& corpus, double alpha);

struct ScoredToken {
    std::string token;
    double score = 0.0;

    bool operator==(const ScoredToken&) const = default;
};

// Both lists are ranked by association with their own direction (descending),
// ties broken lexicographically. Away scores are the negated log-odds.
struct DirectionLists {
    std::vector<ScoredToken> toward_stereotype;
    std::vector<ScoredToken> away_from_stereotype;
};

struct LexiconReport {
    int k = 7;
    double alpha = 1.0;
    std::map<BiasCategory, DirectionLists> per_category;
    DirectionLists overall;
};

LexiconReport build_lexicon_report(std::span<const EvalRecord> records,
                                   std::span<const McsbItem> items, PromptMode mode_rule,
                                   int k = 7, double alpha = 1.0);

nlohmann::json lexicon_to_json(const LexiconReport& report);
// Two stacked tables: the away block, then the toward block, one row per
// category plus an "All" row of quoted comma-joined words.
std::string lexicon_to_markdown(const LexiconReport& report);

}  // namespace biasaudit
