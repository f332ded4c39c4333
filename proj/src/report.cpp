#include "biasaudit/report.hpp"

#include <cstdio>

#include "biasaudit/categories.hpp"
#include "biasaudit/detail/io.hpp"
#include "biasaudit/detail/strings.hpp"

namespace biasaudit {

using nlohmann::json;

std::optional<TableFormat> table_format_from_string(std::string_view s) {
    if (s == "markdown") return TableFormat::markdown;
    if (s == "csv") return TableFormat::csv;
    if (s == "json") return TableFormat::json;
    return std::nullopt;
}

namespace {

std::vector<BiasCategory> ordered_categories(const StatsByCategory& stats) {
    std::vector<BiasCategory> present;
    present.reserve(stats.size());
    for (const auto& [category, cat] : stats) present.push_back(category);
    return canonical_category_order(present);
}

std::string stats_markdown(const StatsByCategory& stats) {
    std::string out =
        "| Category | N | Stereotype | Anti-stereotype | Unrelated | Unparseable "
        "| Stereotype CI |\n| --- | --- | --- | --- | --- | --- | --- |\n";
    for (const BiasCategory& category : ordered_categories(stats)) {
        const CategoryStats& cat = stats.at(category);
        out += "| " + display_name(category) + " | " + std::to_string(cat.n);
        for (Outcome key : kOutcomeOrder) {
            out += " | " + detail::format_ratio(cat.ratios.at(key));
        }
        const Interval& ci = cat.ci.at(Outcome::stereotype);
        out += " | [" + detail::format_ratio(ci.low) + ", " + detail::format_ratio(ci.high) +
               "] |\n";
    }
    return out;
}

}  // namespace

std::string render_table(const StatsByCategory& stats, TableFormat format) {
    switch (format) {
        case TableFormat::markdown: return stats_markdown(stats);
        case TableFormat::csv: return stats_to_csv(stats);
        case TableFormat::json: return stats_to_json(stats).dump(2) + "\n";
    }
    return {};
}

std::string render_table(const DeltaReport& report, TableFormat format) {
    std::vector<BiasCategory> present;
    for (const auto& [category, row] : report.rows) present.push_back(category);
    const auto order = canonical_category_order(present);

    switch (format) {
        case TableFormat::markdown: {
            std::string out = "| Category | Baseline | Delta |\n| --- | --- | --- |\n";
            for (const BiasCategory& category : order) {
                const auto& row = report.rows.at(category);
                out += "| " + display_name(category) + " | " + detail::format_ratio(row.baseline) +
                       " | " + detail::format_delta(row.delta) + " |\n";
            }
            return out;
        }
        case TableFormat::csv: {
            std::string out = "category,key,baseline,delta\n";
            for (const BiasCategory& category : order) {
                const auto& row = report.rows.at(category);
                out += category.name + "," + std::string(to_string(report.key)) + "," +
                       detail::format_full(row.baseline) + "," + detail::format_full(row.delta) +
                       "\n";
            }
            return out;
        }
        case TableFormat::json: {
            json out;
            out["key"] = std::string(to_string(report.key));
            for (const auto& [category, row] : report.rows) {
                out["rows"][category.name] = {{"baseline", row.baseline}, {"delta", row.delta}};
            }
            return out.dump(2) + "\n";
        }
    }
    return {};
}

std::string render_cross(const CrossEvalReport& report, TableFormat format) {
    if (format == TableFormat::json) {
        json out = json::array();
        for (const auto& [key, stats] : report.cells) {
            out.push_back({{"train_corpus", key.train_corpus},
                           {"eval_corpus", key.eval_corpus},
                           {"variant", key.variant},
                           {"stats", stats_to_json(stats)}});
        }
        return out.dump(2) + "\n";
    }
    if (format == TableFormat::csv) {
        std::string out = "train_corpus,eval_corpus,variant,category,n,ratio_stereotype\n";
        for (const auto& [key, stats] : report.cells) {
            for (const BiasCategory& category : ordered_categories(stats)) {
                const CategoryStats& cat = stats.at(category);
                out += key.train_corpus + "," + key.eval_corpus + "," + key.variant + "," +
                       category.name + "," + std::to_string(cat.n) + "," +
                       detail::format_full(cat.ratios.at(Outcome::stereotype)) + "\n";
            }
        }
        return out;
    }
    std::string out;
    for (const auto& [key, stats] : report.cells) {
        out += "### " + key.eval_corpus + " test data, " + key.train_corpus + "-trained model (" +
               key.variant + ")\n\n";
        out += stats_markdown(stats);
        out += "\n";
    }
    return out;
}

namespace {

std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    return buf;
}

}  // namespace

void render_plot(const StatsByCategory& stats, const std::filesystem::path& out_path) {
    if (stats.empty()) throw precondition_error("render_plot needs at least one category");

    const auto order = ordered_categories(stats);
    static constexpr const char* colors[4] = {"#c0504d", "#4f81bd", "#9bbb59", "#8064a2"};

    const double bar_w = 18.0, bar_gap = 4.0, group_gap = 36.0;
    const double group_w = 4 * bar_w + 3 * bar_gap;
    const double margin_left = 50.0, margin_top = 20.0, plot_h = 220.0;
    const double width =
        margin_left + static_cast<double>(order.size()) * (group_w + group_gap) + 20.0;
    const double height = margin_top + plot_h + 60.0;

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + svg_num(width) +
                      "\" height=\"" + svg_num(height) + "\" font-family=\"sans-serif\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // y axis with 0/0.25/0.5/0.75/1 gridlines
    for (int i = 0; i <= 4; ++i) {
        const double frac = static_cast<double>(i) / 4.0;
        const double y = margin_top + plot_h * (1.0 - frac);
        svg += "<line x1=\"" + svg_num(margin_left) + "\" y1=\"" + svg_num(y) + "\" x2=\"" +
               svg_num(width - 10.0) + "\" y2=\"" + svg_num(y) +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + svg_num(margin_left - 6.0) + "\" y=\"" + svg_num(y + 4.0) +
               "\" font-size=\"11\" text-anchor=\"end\">" + detail::format_ratio(frac) +
               "</text>\n";
    }

    double x = margin_left + group_gap / 2.0;
    for (const BiasCategory& category : order) {
        const CategoryStats& cat = stats.at(category);
        double bx = x;
        int color = 0;
        for (Outcome key : kOutcomeOrder) {
            const double ratio = cat.ratios.at(key);
            const double h = plot_h * ratio;
            svg += "<rect x=\"" + svg_num(bx) + "\" y=\"" + svg_num(margin_top + plot_h - h) +
                   "\" width=\"" + svg_num(bar_w) + "\" height=\"" + svg_num(h) + "\" fill=\"" +
                   colors[color] + "\"/>\n";
            bx += bar_w + bar_gap;
            ++color;
        }
        svg += "<text x=\"" + svg_num(x + group_w / 2.0) + "\" y=\"" +
               svg_num(margin_top + plot_h + 16.0) +
               "\" font-size=\"11\" text-anchor=\"middle\">" + display_name(category) +
               "</text>\n";
        x += group_w + group_gap;
    }

    // legend
    double lx = margin_left;
    const double ly = margin_top + plot_h + 34.0;
    static constexpr const char* labels[4] = {"stereotype", "anti-stereotype", "unrelated",
                                              "unparseable"};
    for (int i = 0; i < 4; ++i) {
        svg += "<rect x=\"" + svg_num(lx) + "\" y=\"" + svg_num(ly) +
               "\" width=\"10\" height=\"10\" fill=\"" + colors[i] + "\"/>\n";
        svg += "<text x=\"" + svg_num(lx + 14.0) + "\" y=\"" + svg_num(ly + 9.0) +
               "\" font-size=\"11\">" + labels[i] + "</text>\n";
        lx += 120.0;
    }
    svg += "</svg>\n";

    detail::write_file_atomic(out_path, svg);
}

}  // namespace biasaudit
