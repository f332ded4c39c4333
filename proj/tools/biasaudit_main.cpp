// biasaudit: stereotype-selection audit harness for chat-completion models.
// Pipeline: ingest -> split -> evaluate -> report / bow, with paraphrase
// augmentation, fine-tune export, and remote fine-tune submission.

#include <CLI11.hpp>

#include <chrono>
#include <iostream>
#include <thread>

#include "biasaudit/augment.hpp"
#include "biasaudit/categories.hpp"
#include "biasaudit/corpus.hpp"
#include "biasaudit/detail/io.hpp"
#include "biasaudit/evaluator.hpp"
#include "biasaudit/lexicon.hpp"
#include "biasaudit/metrics.hpp"
#include "biasaudit/modelgate.hpp"
#include "biasaudit/report.hpp"

using namespace biasaudit;

namespace {

namespace fs = std::filesystem;

struct BackendFlags {
    std::string kind = "mock_first";
    std::string endpoint_url;
    std::string model_name;
    double temperature = 0.0;
    int max_in_flight = 4;
    std::string auth_ref;
    std::uint64_t backend_seed = 0;
    int retry_attempts = 4;
    int retry_delay_ms = 250;

    void attach(CLI::App* cmd) {
        cmd->add_option("--backend", kind, "Backend kind")
            ->check(CLI::IsMember({"openai_http", "mock_first", "mock_gold", "mock_uniform"}));
        cmd->add_option("--endpoint", endpoint_url,
                        "OpenAI-compatible API base URL (openai_http)");
        cmd->add_option("--model", model_name, "Model name (openai_http)");
        cmd->add_option("--temperature", temperature, "Sampling temperature")
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("--max-in-flight", max_in_flight, "Per-backend request concurrency cap")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--auth-ref", auth_ref, "Env var holding the API credential");
        cmd->add_option("--backend-seed", backend_seed, "Draw seed for mock_uniform");
        cmd->add_option("--retry-attempts", retry_attempts, "Total transport attempts")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--retry-delay-ms", retry_delay_ms, "Initial retry backoff")
            ->check(CLI::PositiveNumber);
    }

    BackendSpec spec() const {
        BackendSpec out;
        const auto parsed = backend_kind_from_string(kind);
        if (!parsed) throw config_error("unknown backend kind: " + kind);
        out.kind = *parsed;
        out.endpoint_url = endpoint_url;
        out.model_name = model_name;
        out.temperature = temperature;
        out.max_in_flight = max_in_flight;
        out.auth_ref = auth_ref;
        out.seed = backend_seed;
        return out;
    }

    RetryPolicy retry() const {
        return {retry_attempts, std::chrono::milliseconds(retry_delay_ms), 2.0};
    }
};

std::set<BiasCategory> parse_categories(const std::string& csv) {
    std::set<BiasCategory> out;
    if (csv.empty()) return out;
    std::size_t start = 0;
    while (start <= csv.size()) {
        const auto comma = csv.find(',', start);
        const std::string token =
            csv.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!token.empty()) {
            const auto category = BiasCategory::parse(token);
            if (!category) throw config_error("bad category token: \"" + token + "\"");
            out.insert(*category);
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

std::vector<std::string> split_csv_list(const std::string& csv) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= csv.size()) {
        const auto comma = csv.find(',', start);
        std::string token =
            csv.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        while (!token.empty() && token.front() == ' ') token.erase(token.begin());
        while (!token.empty() && token.back() == ' ') token.pop_back();
        if (!token.empty()) out.push_back(token);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string format_extension(TableFormat format) {
    switch (format) {
        case TableFormat::markdown: return "md";
        case TableFormat::csv: return "csv";
        case TableFormat::json: return "json";
    }
    return "txt";
}

void note(const fs::path& path) { std::cout << "wrote " << path.string() << "\n"; }

// ---- subcommand bodies ----------------------------------------------------

int run_ingest(const std::string& stereoset_path, const std::string& portion_name,
               const std::string& crowspairs_path, const std::string& categories_csv,
               const fs::path& out_dir) {
    if (stereoset_path.empty() && crowspairs_path.empty()) {
        throw config_error("ingest needs --stereoset and/or --crowspairs");
    }
    const auto portion = stereoset_portion_from_string(portion_name);
    if (!portion) throw config_error("unknown portion: " + portion_name);

    LoadResult merged;
    if (!stereoset_path.empty()) {
        auto loaded = load_stereoset(stereoset_path, *portion);
        merged.items.insert(merged.items.end(), loaded.items.begin(), loaded.items.end());
        merged.rejects.insert(merged.rejects.end(), loaded.rejects.begin(), loaded.rejects.end());
    }
    if (!crowspairs_path.empty()) {
        auto loaded = load_crowspairs(crowspairs_path);
        merged.items.insert(merged.items.end(), loaded.items.begin(), loaded.items.end());
        merged.rejects.insert(merged.rejects.end(), loaded.rejects.begin(), loaded.rejects.end());
    }

    const auto categories = parse_categories(categories_csv);
    const auto items = filter_items(merged.items, categories);

    fs::create_directories(out_dir);
    write_items(out_dir / "items.jsonl", items);
    write_rejects(out_dir / "rejects.jsonl", merged.rejects);
    note(out_dir / "items.jsonl");
    note(out_dir / "rejects.jsonl");
    std::cout << "ingested " << items.size() << " items, rejected " << merged.rejects.size()
              << " records\n";
    return 0;
}

int run_split(const fs::path& items_path, std::size_t per_category_train, std::uint64_t seed,
              const fs::path& out_dir) {
    const auto items = read_items(items_path);
    const auto split = split_train_test(items, SplitSpec{per_category_train, seed});
    fs::create_directories(out_dir / "splits");
    write_items(out_dir / "splits" / "train.jsonl", split.train);
    write_items(out_dir / "splits" / "test.jsonl", split.test);
    note(out_dir / "splits" / "train.jsonl");
    note(out_dir / "splits" / "test.jsonl");
    std::cout << "train " << split.train.size() << " / test " << split.test.size() << "\n";
    return 0;
}

int run_evaluate(const fs::path& items_path, const std::string& mode_name,
                 const BackendFlags& backend, std::uint64_t seed, const std::string& cache_dir,
                 int parallelism, bool include_blank_context, std::string tag,
                 const fs::path& out_dir) {
    const auto mode = prompt_mode_from_string(mode_name);
    if (!mode) throw config_error("unknown mode: " + mode_name);
    const auto items = read_items(items_path);

    ModelGate gate(backend.spec(), nullptr, backend.retry());
    EvalRunConfig config;
    config.seed = seed;
    config.parallelism = parallelism;
    config.transcript_options.include_blank_context = include_blank_context;
    if (!cache_dir.empty()) config.cache_dir = fs::path(cache_dir);

    const auto records = evaluate(items, *mode, gate, config);

    if (tag.empty()) tag = mode_name + "-" + backend.kind;
    fs::create_directories(out_dir / "records");
    write_records(out_dir / "records" / (tag + ".jsonl"), records);
    note(out_dir / "records" / (tag + ".jsonl"));

    const auto manifest = run_manifest(gate.spec(), *mode, seed, file_digest(items_path));
    detail::write_file_atomic(out_dir / "manifest.json", manifest.dump(2) + "\n");
    note(out_dir / "manifest.json");
    return 0;
}

int run_report(const std::vector<std::string>& records_paths, const std::string& baseline_path,
               const std::string& key_name, const std::string& format_name, double z,
               bool parseable_only_flag, bool plot, const fs::path& out_dir) {
    const auto format = table_format_from_string(format_name);
    if (!format) throw config_error("unknown format: " + format_name);

    std::vector<EvalRecord> records;
    for (const auto& path : records_paths) {
        const auto batch = read_records(path);
        records.insert(records.end(), batch.begin(), batch.end());
    }
    if (parseable_only_flag) records = parseable_only(records);
    const auto stats = aggregate(records, AggregateOptions{z});

    fs::create_directories(out_dir / "reports");
    const auto stats_path = out_dir / "reports" / ("stats." + format_extension(*format));
    const std::string rendered = render_table(stats, *format);
    detail::write_file_atomic(stats_path, rendered);
    note(stats_path);
    std::cout << rendered;

    if (!baseline_path.empty()) {
        const auto key = outcome_from_string(key_name);
        if (!key) throw config_error("unknown outcome key: " + key_name);
        auto baseline_records = read_records(baseline_path);
        if (parseable_only_flag) baseline_records = parseable_only(baseline_records);
        const auto delta =
            compare(aggregate(baseline_records, AggregateOptions{z}), stats, *key);
        const auto delta_path = out_dir / "reports" / ("delta." + format_extension(*format));
        detail::write_file_atomic(delta_path, render_table(delta, *format));
        note(delta_path);
    }

    if (plot) {
        const auto plot_path = out_dir / "reports" / "plot.svg";
        render_plot(stats, plot_path);
        note(plot_path);
    }
    return 0;
}

int run_bow(const fs::path& records_path, const fs::path& items_path, const std::string& mode_name,
            int k, double alpha, const fs::path& out_dir) {
    const auto mode = prompt_mode_from_string(mode_name);
    if (!mode) throw config_error("unknown mode: " + mode_name);
    const auto records = read_records(records_path);
    const auto items = read_items(items_path);
    const auto report = build_lexicon_report(records, items, *mode, k, alpha);

    fs::create_directories(out_dir / "lexicon");
    detail::write_file_atomic(out_dir / "lexicon" / "lexicon.json",
                              lexicon_to_json(report).dump(2) + "\n");
    detail::write_file_atomic(out_dir / "lexicon" / "lexicon.md", lexicon_to_markdown(report));
    note(out_dir / "lexicon" / "lexicon.json");
    note(out_dir / "lexicon" / "lexicon.md");
    return 0;
}

int run_augment(const fs::path& items_path, const BackendFlags& backend,
                const std::string& style_name, const std::string& cache_dir,
                const fs::path& out_dir) {
    const auto style = paraphrase_style_from_string(style_name);
    if (!style) throw config_error("unknown paraphrase style: " + style_name);
    const auto items = read_items(items_path);

    ModelGate gate(backend.spec(), nullptr, backend.retry());
    std::optional<DiskCache> cache;
    if (!cache_dir.empty()) cache.emplace(cache_dir);

    std::vector<AugmentedItem> augs;
    augs.reserve(items.size());
    for (const auto& item : items) {
        augs.push_back(paraphrase_item(item, gate, *style, cache ? &*cache : nullptr));
    }
    const auto augmented = apply_augmentation(items, augs);

    fs::create_directories(out_dir / "augmented");
    write_items(out_dir / "augmented" / "items.jsonl", augmented);
    note(out_dir / "augmented" / "items.jsonl");

    std::string slots;
    int valid = 0, invalid = 0;
    for (const auto& aug : augs) {
        nlohmann::json j;
        j["original_id"] = aug.original_id;
        j["generator_tag"] = aug.generator_tag;
        nlohmann::json choices = nlohmann::json::array();
        const auto slot_json = [&](const ParaphraseSlot& slot) {
            (slot.valid ? valid : invalid) += 1;
            return nlohmann::json{
                {"text", slot.text}, {"valid", slot.valid}, {"reason", slot.reason}};
        };
        if (aug.context) j["context"] = slot_json(*aug.context);
        for (const auto& slot : aug.choices) choices.push_back(slot_json(slot));
        j["choices"] = std::move(choices);
        slots += j.dump();
        slots += '\n';
    }
    detail::write_file_atomic(out_dir / "augmented" / "slots.jsonl", slots);
    note(out_dir / "augmented" / "slots.jsonl");
    std::cout << "paraphrase slots: " << valid << " valid, " << invalid << " invalid\n";
    return 0;
}

int run_export_finetune(const fs::path& items_path, const std::string& mode_name,
                        const std::string& variant_name, const std::string& bow_words_csv,
                        const std::string& bow_lexicon_path, const fs::path& out_dir) {
    const auto mode = prompt_mode_from_string(mode_name);
    if (!mode) throw config_error("unknown mode: " + mode_name);
    const auto variant = finetune_variant_from_string(variant_name);
    if (!variant) throw config_error("unknown variant: " + variant_name);

    std::vector<std::string> bow_words = split_csv_list(bow_words_csv);
    if (bow_words.empty() && !bow_lexicon_path.empty()) {
        const auto lexicon = nlohmann::json::parse(detail::read_file(bow_lexicon_path));
        for (const auto& entry : lexicon.at("overall").at("toward_stereotype")) {
            bow_words.push_back(entry.at("token").get<std::string>());
        }
    }

    const auto items = read_items(items_path);
    const auto examples = export_finetune(items, *mode, *variant, bow_words);
    fs::create_directories(out_dir / "finetune");
    const auto path = out_dir / "finetune" / (mode_name + "-" + variant_name + ".jsonl");
    write_finetune_jsonl(path, examples);
    note(path);
    std::cout << "exported " << examples.size() << " examples\n";
    return 0;
}

int run_finetune_submit(const std::string& endpoint, const fs::path& training_file,
                        const std::string& model, const std::string& auth_ref, bool poll,
                        int poll_interval_ms, int poll_timeout_ms) {
    FinetuneClient client(endpoint, auth_ref);
    const std::string job_id = client.submit(training_file, model);
    std::cout << "job: " << job_id << "\n";
    if (!poll) return 0;

    const auto deadline =
        std::chrono::steady_clock::now() + std::chrono::milliseconds(poll_timeout_ms);
    for (;;) {
        const auto status = client.poll(job_id);
        std::cout << "status: " << to_string(status.state) << "\n";
        if (status.state == JobState::succeeded) {
            std::cout << "model: " << status.model_id << "\n";
            return 0;
        }
        if (status.state == JobState::failed) {
            std::cerr << "fine-tune failed: " << status.reason << "\n";
            return 2;
        }
        if (std::chrono::steady_clock::now() > deadline) {
            std::cerr << "poll timeout after " << poll_timeout_ms << " ms\n";
            return 2;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(poll_interval_ms));
    }
}

int run_cross_eval(const std::vector<std::string>& run_descriptors, const std::string& format_name,
                   const fs::path& out_dir) {
    const auto format = table_format_from_string(format_name);
    if (!format) throw config_error("unknown format: " + format_name);

    std::vector<CrossRun> runs;
    for (const auto& descriptor : run_descriptors) {
        CrossRun run;
        std::string records_path;
        for (const auto& pair : split_csv_list(descriptor)) {
            const auto eq = pair.find('=');
            if (eq == std::string::npos) {
                throw config_error("bad --run entry (want key=value): " + pair);
            }
            const std::string key = pair.substr(0, eq);
            const std::string value = pair.substr(eq + 1);
            if (key == "train") run.key.train_corpus = value;
            else if (key == "eval") run.key.eval_corpus = value;
            else if (key == "variant") run.key.variant = value;
            else if (key == "records") records_path = value;
            else throw config_error("unknown --run key: " + key);
        }
        if (records_path.empty()) throw config_error("--run entry needs records=FILE");
        run.records = read_records(records_path);
        runs.push_back(std::move(run));
    }

    const auto report = cross_matrix(runs);
    fs::create_directories(out_dir / "reports");
    const auto path = out_dir / "reports" / ("cross." + format_extension(*format));
    const std::string rendered = render_cross(report, *format);
    detail::write_file_atomic(path, rendered);
    note(path);
    std::cout << rendered;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"biasaudit: multiple-choice stereotype-selection audit for chat models"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Key-value config file (INI); command-line flags override");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Normalize benchmark files into items.jsonl");
    std::string in_stereoset, in_crowspairs, in_categories, in_portion = "intersentence";
    std::string in_out;
    ingest->add_option("--stereoset", in_stereoset, "StereoSet JSON file")
        ->check(CLI::ExistingFile);
    ingest->add_option("--portion", in_portion, "StereoSet portion")
        ->check(CLI::IsMember({"intersentence", "intrasentence", "both"}));
    ingest->add_option("--crowspairs", in_crowspairs, "CrowS-Pairs CSV file")
        ->check(CLI::ExistingFile);
    ingest->add_option("--categories", in_categories, "Comma-separated category filter");
    ingest->add_option("--out", in_out, "Output directory")->required();

    // split
    auto* split = app.add_subcommand("split", "Seeded per-category train/test split");
    std::string sp_items, sp_out;
    std::size_t sp_train = 20;
    std::uint64_t sp_seed = 0;
    split->add_option("--items", sp_items, "Normalized items file")
        ->required()
        ->check(CLI::ExistingFile);
    split->add_option("--per-category-train", sp_train, "Train items per category")
        ->required()
        ->check(CLI::PositiveNumber);
    split->add_option("--seed", sp_seed, "Split draw seed");
    split->add_option("--out", sp_out, "Output directory")->required();

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Run items against a backend");
    std::string ev_items, ev_mode, ev_cache, ev_tag, ev_out;
    std::uint64_t ev_seed = 1;
    int ev_parallelism = 1;
    bool ev_blank_context = false;
    BackendFlags ev_backend;
    evaluate->add_option("--items", ev_items, "Items file to evaluate")
        ->required()
        ->check(CLI::ExistingFile);
    evaluate->add_option("--mode", ev_mode, "Prompting mode")
        ->required()
        ->check(CLI::IsMember({"implicit", "explicit"}));
    ev_backend.attach(evaluate);
    evaluate->add_option("--seed", ev_seed, "Choice-order permutation seed (0 = identity)");
    evaluate->add_option("--cache", ev_cache, "Completion cache directory");
    evaluate->add_option("--parallelism", ev_parallelism, "Concurrent completions")
        ->check(CLI::PositiveNumber);
    evaluate->add_flag("--include-blank-context", ev_blank_context,
                       "Keep fill-in-template context turns");
    evaluate->add_option("--tag", ev_tag, "Records file tag (default <mode>-<backend>)");
    evaluate->add_option("--out", ev_out, "Output directory")->required();

    // report
    auto* report = app.add_subcommand("report", "Aggregate records into tables and plots");
    std::vector<std::string> rp_records;
    std::string rp_baseline, rp_key = "stereotype", rp_format = "markdown", rp_out;
    double rp_z = 1.96;
    bool rp_parseable_only = false, rp_plot = false;
    report->add_option("--records", rp_records, "Records file(s)")
        ->required()
        ->check(CLI::ExistingFile);
    report->add_option("--baseline", rp_baseline, "Baseline records file for a delta report")
        ->check(CLI::ExistingFile);
    report->add_option("--key", rp_key, "Outcome key for deltas")
        ->check(CLI::IsMember({"stereotype", "anti_stereotype", "unrelated", "unparseable"}));
    report->add_option("--format", rp_format, "Table format")
        ->check(CLI::IsMember({"markdown", "csv", "json"}));
    report->add_option("--z", rp_z, "Wilson interval z value")->check(CLI::PositiveNumber);
    report->add_flag("--parseable-only", rp_parseable_only,
                     "Compute ratios over parseable records only");
    report->add_flag("--plot", rp_plot, "Also write an SVG bar chart");
    report->add_option("--out", rp_out, "Output directory")->required();

    // bow
    auto* bow = app.add_subcommand("bow", "Bag-of-words decision lexicon");
    std::string bw_records, bw_items, bw_mode = "explicit", bw_out;
    int bw_k = 7;
    double bw_alpha = 1.0;
    bow->add_option("--records", bw_records, "Records file")
        ->required()
        ->check(CLI::ExistingFile);
    bow->add_option("--items", bw_items, "Items file the records reference")
        ->required()
        ->check(CLI::ExistingFile);
    bow->add_option("--mode", bw_mode, "Which mode's records to analyze")
        ->check(CLI::IsMember({"implicit", "explicit"}));
    bow->add_option("--k", bw_k, "Words per direction list")->check(CLI::PositiveNumber);
    bow->add_option("--alpha", bw_alpha, "Smoothing constant")->check(CLI::PositiveNumber);
    bow->add_option("--out", bw_out, "Output directory")->required();

    // augment
    auto* augment = app.add_subcommand("augment", "Paraphrase-replace item texts");
    std::string ag_items, ag_style = "t5_prefix", ag_cache, ag_out;
    BackendFlags ag_backend;
    augment->add_option("--items", ag_items, "Items file to augment")
        ->required()
        ->check(CLI::ExistingFile);
    ag_backend.attach(augment);
    augment->add_option("--style", ag_style, "Paraphrase request style")
        ->check(CLI::IsMember({"t5_prefix", "instruct"}));
    augment->add_option("--cache", ag_cache, "Completion cache directory");
    augment->add_option("--out", ag_out, "Output directory")->required();

    // export-finetune
    auto* exportft = app.add_subcommand("export-finetune", "Write chat fine-tuning JSONL");
    std::string xf_items, xf_mode, xf_variant = "plain", xf_bow_words, xf_bow_lexicon, xf_out;
    exportft->add_option("--items", xf_items, "Items file to export")
        ->required()
        ->check(CLI::ExistingFile);
    exportft->add_option("--mode", xf_mode, "Prompting mode")
        ->required()
        ->check(CLI::IsMember({"implicit", "explicit"}));
    exportft->add_option("--variant", xf_variant, "System-turn variant")
        ->check(CLI::IsMember({"plain", "bow_system", "debias_system"}));
    exportft->add_option("--bow-words", xf_bow_words, "Comma-separated trigger words");
    exportft->add_option("--bow-lexicon", xf_bow_lexicon,
                         "lexicon.json to take toward-stereotype words from")
        ->check(CLI::ExistingFile);
    exportft->add_option("--out", xf_out, "Output directory")->required();

    // finetune-submit
    auto* submit = app.add_subcommand("finetune-submit", "Upload JSONL and start a fine-tune job");
    std::string fs_endpoint, fs_file, fs_model, fs_auth;
    bool fs_poll = false;
    int fs_interval = 2000, fs_timeout = 600000;
    submit->add_option("--endpoint", fs_endpoint, "OpenAI-compatible API base URL")->required();
    submit->add_option("--training-file", fs_file, "Fine-tuning JSONL file")
        ->required()
        ->check(CLI::ExistingFile);
    submit->add_option("--model", fs_model, "Base model to tune")->required();
    submit->add_option("--auth-ref", fs_auth, "Env var holding the API credential");
    submit->add_flag("--poll", fs_poll, "Poll until the job finishes");
    submit->add_option("--poll-interval-ms", fs_interval, "Poll period")
        ->check(CLI::PositiveNumber);
    submit->add_option("--poll-timeout-ms", fs_timeout, "Poll deadline")
        ->check(CLI::PositiveNumber);

    // cross-eval
    auto* cross = app.add_subcommand("cross-eval", "Cross-dataset evaluation matrix");
    std::vector<std::string> cr_runs;
    std::string cr_format = "markdown", cr_out;
    cross
        ->add_option("--run", cr_runs,
                     "Cell descriptor: train=TAG,eval=TAG,variant=TAG,records=FILE")
        ->required();
    cross->add_option("--format", cr_format, "Table format")
        ->check(CLI::IsMember({"markdown", "csv", "json"}));
    cross->add_option("--out", cr_out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\nrun '" << argv[0] << " --help' for usage\n";
        return 1;
    }

    try {
        if (*ingest) {
            return run_ingest(in_stereoset, in_portion, in_crowspairs, in_categories, in_out);
        }
        if (*split) return run_split(sp_items, sp_train, sp_seed, sp_out);
        if (*evaluate) {
            return run_evaluate(ev_items, ev_mode, ev_backend, ev_seed, ev_cache, ev_parallelism,
                                ev_blank_context, ev_tag, ev_out);
        }
        if (*report) {
            return run_report(rp_records, rp_baseline, rp_key, rp_format, rp_z, rp_parseable_only,
                              rp_plot, rp_out);
        }
        if (*bow) return run_bow(bw_records, bw_items, bw_mode, bw_k, bw_alpha, bw_out);
        if (*augment) return run_augment(ag_items, ag_backend, ag_style, ag_cache, ag_out);
        if (*exportft) {
            return run_export_finetune(xf_items, xf_mode, xf_variant, xf_bow_words, xf_bow_lexicon,
                                       xf_out);
        }
        if (*submit) {
            return run_finetune_submit(fs_endpoint, fs_file, fs_model, fs_auth, fs_poll,
                                       fs_interval, fs_timeout);
        }
        if (*cross) return run_cross_eval(cr_runs, cr_format, cr_out);
        std::cerr << "no subcommand selected\n";
        return 1;
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const precondition_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const format_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const transport_error& e) {
        std::cerr << "transport error: " << e.what() << "\n";
        return 2;
    } catch (const protocol_error& e) {
        std::cerr << "protocol error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 2;
    }
}
