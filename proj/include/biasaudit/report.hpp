#pragma once

#include <filesystem>
#include <string>

#include "biasaudit/metrics.hpp"

namespace biasaudit {

enum class TableFormat { markdown, csv, json };

std::optional<TableFormat> table_format_from_string(std::string_view s);

// Markdown renders ratios with exactly two decimals and rows in canonical
// category order; csv/json keep full precision for downstream tooling.
std::string render_table(const StatsByCategory& stats, TableFormat format);
// Deltas render with an explicit sign in markdown ("+0.39", "-0.02").
std::string render_table(const DeltaReport& report, TableFormat format);
std::string render_cross(const CrossEvalReport& report, TableFormat format);

// Grouped bar chart of outcome ratios per category; self-contained SVG with
// deterministic bytes. Throws on empty stats.
void render_plot(const StatsByCategory& stats, const std::filesystem::path& out_path);

}  // namespace biasaudit
