#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "biasaudit/modelgate.hpp"
#include "biasaudit/prompting.hpp"
#include "biasaudit/types.hpp"

namespace biasaudit {

// Outcome of parsing one raw completion. No symbol means unparseable; models
// answering off-menu is a finding, not an error.
struct ParsedAnswer {
    std::optional<char> symbol;
    std::optional<GoldLabel> resolved;  // set iff symbol is set, via the binding

    bool unparseable() const { return !symbol.has_value(); }
    bool operator==(const ParsedAnswer&) const = default;
};

// Normalizes a raw reply and extracts a bound symbol if one is present:
// trim, strip surrounding quotes/periods/colons, case-fold; accept a lone
// symbol, otherwise the first standalone symbol token. nullopt = unparseable.
std::optional<char> parse_answer(std::string_view raw, std::span<const char> valid_symbols);

struct EvalRecord {
    std::string item_id;
    BiasCategory category;
    PromptMode mode = PromptMode::Implicit;
    std::vector<int> permutation;
    std::string backend_id;
    std::string raw_text;
    ParsedAnswer parsed;
    bool from_cache = false;
    std::optional<std::string> error;  // transport failure annotation

    bool operator==(const EvalRecord&) const = default;
};

struct EvalRunConfig {
    std::uint64_t seed = 1;
    std::optional<std::filesystem::path> cache_dir;
    int parallelism = 1;
    TranscriptOptions transcript_options;
    double abort_failure_ratio = 0.5;  // abort when more than this fraction fails transport
};

// One EvalRecord per item, in item order, regardless of completion order.
// Per-item transport/protocol failures become unparseable records with an
// error annotation; the run aborts only past abort_failure_ratio.
std::vector<EvalRecord> evaluate(std::span<const McsbItem> items, PromptMode mode, ModelGate& gate,
                                 const EvalRunConfig& config);

std::string record_to_json_line(const EvalRecord& record);
EvalRecord record_from_json_line(std::string_view line);
void write_records(const std::filesystem::path& path, std::span<const EvalRecord> records);
std::vector<EvalRecord> read_records(const std::filesystem::path& path);

// {backend spec minus credentials, mode, seed, dataset digest, timestamp}.
nlohmann::json run_manifest(const BackendSpec& spec, PromptMode mode, std::uint64_t seed,
                            const std::string& dataset_digest);

// sha256 of a file's bytes, for manifest dataset digests.
std::string file_digest(const std::filesystem::path& path);

}  // namespace biasaudit
