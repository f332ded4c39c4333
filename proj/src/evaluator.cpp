#include "biasaudit/evaluator.hpp"

#include <atomic>
#include <cctype>
#include <chrono>
#include <ctime>
#include <fstream>
#include <mutex>
#include <thread>

#include "biasaudit/detail/io.hpp"
#include "biasaudit/detail/sha256.hpp"
#include "biasaudit/detail/strings.hpp"

namespace biasaudit {

using nlohmann::json;

std::optional<char> parse_answer(std::string_view raw, std::span<const char> valid_symbols) {
    if (valid_symbols.empty()) throw precondition_error("valid_symbols must be nonempty");

    const auto matches = [&](std::string_view token) -> std::optional<char> {
        if (token.size() != 1) return std::nullopt;
        const char folded =
            static_cast<char>(std::toupper(static_cast<unsigned char>(token[0])));
        for (char symbol : valid_symbols) {
            if (folded == symbol) return symbol;
        }
        return std::nullopt;
    };

    // Trim whitespace and surrounding quote/period/colon punctuation until
    // stable, e.g. " 'C.' " -> C.
    std::string_view s = raw;
    const auto strippable = [](char c) {
        return c == '\'' || c == '"' || c == '.' || c == ':';
    };
    for (;;) {
        s = detail::trim(s);
        if (!s.empty() && strippable(s.front())) {
            s.remove_prefix(1);
            continue;
        }
        if (!s.empty() && strippable(s.back())) {
            s.remove_suffix(1);
            continue;
        }
        break;
    }
    if (auto hit = matches(s)) return hit;

    // Fall back to the first standalone symbol token; "As" is not "A".
    std::size_t start = 0;
    while (start < s.size()) {
        while (start < s.size() && !detail::is_ascii_alnum(s[start])) ++start;
        std::size_t end = start;
        while (end < s.size() && detail::is_ascii_alnum(s[end])) ++end;
        if (end > start) {
            if (auto hit = matches(s.substr(start, end - start))) return hit;
        }
        start = end + 1;
    }
    return std::nullopt;
}

namespace {

GoldSymbolMap gold_symbols(const McsbItem& item, const Binding& binding) {
    GoldSymbolMap map;
    for (GoldLabel gold :
         {GoldLabel::stereotype, GoldLabel::anti_stereotype, GoldLabel::unrelated}) {
        if (const char symbol = binding.symbol_for_gold(item, gold)) map[gold] = symbol;
    }
    return map;
}

EvalRecord make_record(const McsbItem& item, const Transcript& transcript,
                       const std::string& backend_id) {
    EvalRecord record;
    record.item_id = item.id;
    record.category = item.category;
    record.mode = transcript.mode;
    record.permutation = transcript.binding.permutation;
    record.backend_id = backend_id;
    return record;
}

}  // namespace

std::vector<EvalRecord> evaluate(std::span<const McsbItem> items, PromptMode mode, ModelGate& gate,
                                 const EvalRunConfig& config) {
    if (items.empty()) throw precondition_error("evaluate needs at least one item");
    if (config.parallelism < 1) throw precondition_error("parallelism must be >= 1");

    std::optional<DiskCache> cache;
    if (config.cache_dir) cache.emplace(*config.cache_dir);

    std::vector<EvalRecord> records(items.size());
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> failures{0};
    std::mutex fatal_mu;
    std::exception_ptr fatal;

    const auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= items.size()) return;
            {
                std::lock_guard lock(fatal_mu);
                if (fatal) return;
            }
            const McsbItem& item = items[i];
            try {
                const auto perm = permutation_for(item.id, config.seed,
                                                  static_cast<int>(item.choices.size()));
                const Transcript transcript =
                    build_transcript(item, mode, perm, config.transcript_options);
                EvalRecord record = make_record(item, transcript, gate.spec().id());

                const auto hidden = gold_symbols(item, transcript.binding);
                try {
                    const Completion completion =
                        cache ? gate.complete_cached(transcript, *cache, hidden)
                              : gate.complete(transcript, hidden);
                    record.raw_text = completion.text;
                    record.from_cache = completion.from_cache;
                    record.parsed.symbol = parse_answer(
                        record.raw_text,
                        std::span<const char>(transcript.binding.symbols));
                    if (record.parsed.symbol) {
                        const int original =
                            transcript.binding.original_index(*record.parsed.symbol);
                        record.parsed.resolved =
                            item.choices[static_cast<std::size_t>(original)].gold;
                    }
                } catch (const transport_error& e) {
                    record.error = e.what();
                    failures.fetch_add(1);
                } catch (const protocol_error& e) {
                    record.error = e.what();
                    failures.fetch_add(1);
                }
                records[i] = std::move(record);
            } catch (...) {
                std::lock_guard lock(fatal_mu);
                if (!fatal) fatal = std::current_exception();
                return;
            }
        }
    };

    const std::size_t n_threads =
        std::min<std::size_t>(static_cast<std::size_t>(config.parallelism), items.size());
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (fatal) std::rethrow_exception(fatal);

    const double failure_ratio =
        static_cast<double>(failures.load()) / static_cast<double>(items.size());
    if (failure_ratio > config.abort_failure_ratio) {
        throw transport_error(std::to_string(failures.load()) + " of " +
                              std::to_string(items.size()) +
                              " completions failed transport; aborting the run");
    }
    return records;
}

std::string record_to_json_line(const EvalRecord& record) {
    json j;
    j["item_id"] = record.item_id;
    j["category"] = record.category.name;
    j["mode"] = std::string(to_string(record.mode));
    j["permutation"] = record.permutation;
    j["backend_id"] = record.backend_id;
    j["raw_text"] = record.raw_text;
    json parsed;
    if (record.parsed.symbol) parsed["symbol"] = std::string(1, *record.parsed.symbol);
    if (record.parsed.resolved) parsed["resolved"] = std::string(to_string(*record.parsed.resolved));
    j["parsed"] = std::move(parsed);
    j["from_cache"] = record.from_cache;
    if (record.error) j["error"] = *record.error;
    return j.dump();
}

EvalRecord record_from_json_line(std::string_view line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw format_error(std::string("malformed record line: ") + e.what());
    }
    EvalRecord record;
    record.item_id = j.at("item_id").get<std::string>();
    const auto category = BiasCategory::parse(j.at("category").get<std::string>());
    if (!category) throw format_error("malformed category in record line");
    record.category = *category;
    const auto mode = prompt_mode_from_string(j.at("mode").get<std::string>());
    if (!mode) throw format_error("unknown mode in record line: " + j["mode"].dump());
    record.mode = *mode;
    record.permutation = j.at("permutation").get<std::vector<int>>();
    record.backend_id = j.at("backend_id").get<std::string>();
    record.raw_text = j.at("raw_text").get<std::string>();
    if (j.contains("parsed")) {
        const json& parsed = j["parsed"];
        if (parsed.contains("symbol")) {
            const auto s = parsed["symbol"].get<std::string>();
            if (s.size() == 1) record.parsed.symbol = s[0];
        }
        if (parsed.contains("resolved")) {
            record.parsed.resolved = gold_label_from_string(parsed["resolved"].get<std::string>());
        }
    }
    record.from_cache = j.value("from_cache", false);
    if (j.contains("error")) record.error = j["error"].get<std::string>();
    return record;
}

void write_records(const std::filesystem::path& path, std::span<const EvalRecord> records) {
    std::string buf;
    for (const EvalRecord& record : records) {
        buf += record_to_json_line(record);
        buf += '\n';
    }
    detail::write_file_atomic(path, buf);
}

std::vector<EvalRecord> read_records(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw format_error("cannot open records file: " + path.string());
    std::vector<EvalRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        records.push_back(record_from_json_line(line));
    }
    return records;
}

nlohmann::json run_manifest(const BackendSpec& spec, PromptMode mode, std::uint64_t seed,
                            const std::string& dataset_digest) {
    json backend;
    backend["kind"] = std::string(to_string(spec.kind));
    backend["endpoint_url"] = spec.endpoint_url;
    backend["model_name"] = spec.model_name;
    backend["temperature"] = spec.temperature;
    backend["max_in_flight"] = spec.max_in_flight;
    backend["auth_ref"] = spec.auth_ref;  // the env var name, never its value
    backend["seed"] = spec.seed;

    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);

    json manifest;
    manifest["backend"] = std::move(backend);
    manifest["mode"] = std::string(to_string(mode));
    manifest["seed"] = seed;
    manifest["dataset_digest"] = dataset_digest;
    manifest["timestamp"] = stamp;
    return manifest;
}

std::string file_digest(const std::filesystem::path& path) {
    return detail::sha256_hex(detail::read_file(path));
}

}  // namespace biasaudit
