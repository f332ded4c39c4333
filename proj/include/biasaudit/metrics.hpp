#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "biasaudit/evaluator.hpp"
#include "biasaudit/types.hpp"

namespace biasaudit {

enum class Outcome { stereotype, anti_stereotype, unrelated, unparseable };

inline constexpr std::array<Outcome, 4> kOutcomeOrder = {
    Outcome::stereotype, Outcome::anti_stereotype, Outcome::unrelated, Outcome::unparseable};

std::string_view to_string(Outcome o);
std::optional<Outcome> outcome_from_string(std::string_view s);
Outcome outcome_of(const EvalRecord& record);

struct Interval {
    double low = 0.0;
    double high = 0.0;
};

// Per-category outcome tally. counts sum to n; ratios are count/n; ci holds
// the Wilson interval for each outcome's ratio.
struct CategoryStats {
    BiasCategory category;
    std::int64_t n = 0;
    std::map<Outcome, std::int64_t> counts;
    std::map<Outcome, double> ratios;
    std::map<Outcome, Interval> ci;
};

using StatsByCategory = std::map<BiasCategory, CategoryStats>;

struct AggregateOptions {
    double z = 1.96;
};

// Exact integer counting per category; categories absent from records are
// absent from the result.
StatsByCategory aggregate(std::span<const EvalRecord> records, const AggregateOptions& options = {});

// Drops unparseable records, for ratios over parseable attempts only.
std::vector<EvalRecord> parseable_only(std::span<const EvalRecord> records);

// Wilson score interval, clamped to [0, 1]. Throws on n = 0.
Interval wilson_ci(std::int64_t successes, std::int64_t n, double z);

// Baseline ratio plus signed delta per category, for one outcome key.
struct DeltaReport {
    Outcome key = Outcome::stereotype;
    struct Row {
        double baseline = 0.0;
        double delta = 0.0;
    };
    std::map<BiasCategory, Row> rows;
};

// delta = variant.ratio[key] - baseline.ratio[key] per category. Both
// mappings must cover the same categories.
DeltaReport compare(const StatsByCategory& baseline, const StatsByCategory& variant, Outcome key);

struct CrossKey {
    std::string train_corpus;
    std::string eval_corpus;
    std::string variant;

    auto operator<=>(const CrossKey&) const = default;
};

struct CrossEvalReport {
    std::map<CrossKey, StatsByCategory> cells;
};

struct CrossRun {
    CrossKey key;
    std::vector<EvalRecord> records;
};

// One aggregated cell per (train corpus, eval corpus, variant) triple;
// duplicate triples are an error.
CrossEvalReport cross_matrix(std::span<const CrossRun> runs, const AggregateOptions& options = {});

nlohmann::json stats_to_json(const StatsByCategory& stats);
// Fixed column order: category, n, counts, ratios, ci bounds, each block in
// outcome-key order (stereotype, anti_stereotype, unrelated, unparseable).
std::string stats_to_csv(const StatsByCategory& stats);

}  // namespace biasaudit
