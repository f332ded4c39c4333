#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "biasaudit/modelgate.hpp"
#include "biasaudit/prompting.hpp"
#include "biasaudit/types.hpp"

namespace biasaudit {

enum class ParaphraseStyle { t5_prefix, instruct };

std::string_view to_string(ParaphraseStyle s);
std::optional<ParaphraseStyle> paraphrase_style_from_string(std::string_view s);

struct ParaphraseVerdict {
    bool valid = false;
    std::string reason;  // one of empty | identical | length_out_of_bounds, "" when valid
};

struct ParaphraseBounds {
    double min_length_ratio = 0.5;
    double max_length_ratio = 2.0;
};

// A candidate replacement is valid when it is nonempty, differs from the
// original after case-folding, and its length stays within the ratio bounds.
ParaphraseVerdict validate_paraphrase(std::string_view original, std::string_view candidate,
                                      const ParaphraseBounds& bounds = {});

struct ParaphraseSlot {
    std::string text;   // candidate reply (or the original when invalid)
    bool valid = false;
    std::string reason;  // why the slot is invalid, "" when valid
};

struct AugmentedItem {
    std::string original_id;
    std::optional<ParaphraseSlot> context;  // present iff the item has a context
    std::vector<ParaphraseSlot> choices;    // aligned with the item's choices
    std::string generator_tag;
};

// Requests one paraphrase per choice text (and context, when present).
// t5_prefix sends the literal "paraphrase: <text>" form; instruct sends
// "Paraphrase the following sentence: <text>". Transport failures mark the
// slot invalid and keep the original text.
AugmentedItem paraphrase_item(const McsbItem& item, ModelGate& gate, ParaphraseStyle style,
                              const DiskCache* cache = nullptr,
                              const ParaphraseBounds& bounds = {});

// Substitutes valid replacement slots into the train items; any substitution
// appends ":aug" to the item id. Gold labels and categories never change.
// An augmentation referencing an unknown item id throws.
std::vector<McsbItem> apply_augmentation(std::span<const McsbItem> train,
                                         std::span<const AugmentedItem> augs);

enum class FinetuneVariant { plain, bow_system, debias_system };

std::string_view to_string(FinetuneVariant v);
std::optional<FinetuneVariant> finetune_variant_from_string(std::string_view s);

// One supervised example: the item's transcript plus the final assistant
// turn holding exactly the target symbol.
struct FinetuneExample {
    std::vector<Turn> messages;
    char completion = 'A';
};

// Explicit mode teaches stereotype identification (target = the stereotype
// choice's symbol); implicit mode teaches avoidance (target = the
// anti-stereotype symbol). Identity presentation order throughout.
// bow_system requires bow_words.
std::vector<FinetuneExample> export_finetune(std::span<const McsbItem> items, PromptMode mode,
                                             FinetuneVariant variant,
                                             const std::vector<std::string>& bow_words = {});

// Chat fine-tuning JSONL: {"messages":[{role, content}, ...]} per line.
std::string finetune_example_to_json_line(const FinetuneExample& example);
void write_finetune_jsonl(const std::filesystem::path& path,
                          std::span<const FinetuneExample> examples);

enum class JobState { queued, running, succeeded, failed };

std::string_view to_string(JobState s);

struct JobStatus {
    JobState state = JobState::queued;
    std::string model_id;  // succeeded only
    std::string reason;    // failed only
};

// OpenAI-compatible files + fine-tuning jobs client. endpoint_url is the API
// base (e.g. "https://api.openai.com/v1").
class FinetuneClient {
public:
    FinetuneClient(std::string endpoint_url, std::string auth_ref,
                   std::shared_ptr<Transport> transport = nullptr, RetryPolicy retry = {});

    // Uploads the JSONL file and creates a fine-tuning job; returns the job
    // id. Endpoint validation rejections surface verbatim as transport
    // errors.
    std::string submit(const std::filesystem::path& training_file, const std::string& model_name);

    JobStatus poll(const std::string& job_id);

private:
    HttpHeaders auth_headers() const;
    HttpResponse request_with_retry(bool is_post, const std::string& url, const std::string& body,
                                    const HttpHeaders& headers);

    std::string endpoint_url_;
    std::string auth_ref_;
    std::shared_ptr<Transport> transport_;
    RetryPolicy retry_;
};

}  // namespace biasaudit
