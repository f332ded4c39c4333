#include "biasaudit/metrics.hpp"

#include <cmath>

#include "biasaudit/detail/strings.hpp"

namespace biasaudit {

using nlohmann::json;

std::string_view to_string(Outcome o) {
    switch (o) {
        case Outcome::stereotype: return "stereotype";
        case Outcome::anti_stereotype: return "anti_stereotype";
        case Outcome::unrelated: return "unrelated";
        case Outcome::unparseable: return "unparseable";
    }
    return "unparseable";
}

std::optional<Outcome> outcome_from_string(std::string_view s) {
    if (s == "stereotype") return Outcome::stereotype;
    if (s == "anti_stereotype") return Outcome::anti_stereotype;
    if (s == "unrelated") return Outcome::unrelated;
    if (s == "unparseable") return Outcome::unparseable;
    return std::nullopt;
}

Outcome outcome_of(const EvalRecord& record) {
    if (!record.parsed.resolved) return Outcome::unparseable;
    switch (*record.parsed.resolved) {
        case GoldLabel::stereotype: return Outcome::stereotype;
        case GoldLabel::anti_stereotype: return Outcome::anti_stereotype;
        case GoldLabel::unrelated: return Outcome::unrelated;
    }
    return Outcome::unparseable;
}

Interval wilson_ci(std::int64_t successes, std::int64_t n, double z) {
    if (n < 1) throw precondition_error("wilson_ci is undefined for n = 0");
    if (successes < 0 || successes > n) {
        throw precondition_error("successes must lie in [0, n]");
    }
    if (z <= 0.0) throw precondition_error("z must be positive");

    const double nd = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nd;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nd;
    const double center = (p + z2 / (2.0 * nd)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nd + z2 / (4.0 * nd * nd)) / denom;

    Interval out{center - half, center + half};
    out.low = std::max(0.0, out.low);
    out.high = std::min(1.0, out.high);
    return out;
}

StatsByCategory aggregate(std::span<const EvalRecord> records, const AggregateOptions& options) {
    StatsByCategory stats;
    for (const EvalRecord& record : records) {
        CategoryStats& cat = stats[record.category];
        cat.category = record.category;
        ++cat.n;
        ++cat.counts[outcome_of(record)];
    }
    for (auto& [category, cat] : stats) {
        for (Outcome key : kOutcomeOrder) {
            const std::int64_t count = cat.counts[key];  // materialize zeros
            cat.ratios[key] = static_cast<double>(count) / static_cast<double>(cat.n);
            cat.ci[key] = wilson_ci(count, cat.n, options.z);
        }
    }
    return stats;
}

std::vector<EvalRecord> parseable_only(std::span<const EvalRecord> records) {
    std::vector<EvalRecord> out;
    out.reserve(records.size());
    for (const EvalRecord& record : records) {
        if (!record.parsed.unparseable()) out.push_back(record);
    }
    return out;
}

DeltaReport compare(const StatsByCategory& baseline, const StatsByCategory& variant, Outcome key) {
    std::vector<std::string> asymmetric;
    for (const auto& [category, stats] : baseline) {
        if (!variant.contains(category)) asymmetric.push_back(category.name + " (baseline only)");
    }
    for (const auto& [category, stats] : variant) {
        if (!baseline.contains(category)) asymmetric.push_back(category.name + " (variant only)");
    }
    if (!asymmetric.empty()) {
        std::string names;
        for (const auto& name : asymmetric) {
            if (!names.empty()) names += ", ";
            names += name;
        }
        throw precondition_error("category mismatch between baseline and variant: " + names);
    }

    DeltaReport report;
    report.key = key;
    for (const auto& [category, stats] : baseline) {
        const double base = stats.ratios.at(key);
        const double var = variant.at(category).ratios.at(key);
        report.rows[category] = {base, var - base};
    }
    return report;
}

CrossEvalReport cross_matrix(std::span<const CrossRun> runs, const AggregateOptions& options) {
    CrossEvalReport report;
    for (const CrossRun& run : runs) {
        if (run.key.train_corpus.empty() || run.key.eval_corpus.empty() ||
            run.key.variant.empty()) {
            throw precondition_error("cross run tags must be nonempty");
        }
        if (report.cells.contains(run.key)) {
            throw precondition_error("duplicate cross run triple: (" + run.key.train_corpus + ", " +
                                     run.key.eval_corpus + ", " + run.key.variant + ")");
        }
        report.cells[run.key] = aggregate(run.records, options);
    }
    return report;
}

nlohmann::json stats_to_json(const StatsByCategory& stats) {
    json out = json::object();
    for (const auto& [category, cat] : stats) {
        json entry;
        entry["n"] = cat.n;
        for (Outcome key : kOutcomeOrder) {
            const std::string name{to_string(key)};
            entry["counts"][name] = cat.counts.at(key);
            entry["ratios"][name] = cat.ratios.at(key);
            entry["ci"][name] = {{"low", cat.ci.at(key).low}, {"high", cat.ci.at(key).high}};
        }
        out[category.name] = std::move(entry);
    }
    return out;
}

std::string stats_to_csv(const StatsByCategory& stats) {
    std::string out = "category,n";
    for (Outcome key : kOutcomeOrder) out += ",count_" + std::string(to_string(key));
    for (Outcome key : kOutcomeOrder) out += ",ratio_" + std::string(to_string(key));
    for (Outcome key : kOutcomeOrder) {
        out += ",ci_low_" + std::string(to_string(key));
        out += ",ci_high_" + std::string(to_string(key));
    }
    out += '\n';
    for (const auto& [category, cat] : stats) {
        out += category.name + "," + std::to_string(cat.n);
        for (Outcome key : kOutcomeOrder) out += "," + std::to_string(cat.counts.at(key));
        for (Outcome key : kOutcomeOrder) out += "," + detail::format_full(cat.ratios.at(key));
        for (Outcome key : kOutcomeOrder) {
            out += "," + detail::format_full(cat.ci.at(key).low);
            out += "," + detail::format_full(cat.ci.at(key).high);
        }
        out += '\n';
    }
    return out;
}

}  // namespace biasaudit
