#include "biasaudit/augment.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <thread>

#include <nlohmann/json.hpp>

#include "biasaudit/detail/io.hpp"
#include "biasaudit/detail/strings.hpp"

namespace biasaudit {

using nlohmann::json;

std::string_view to_string(ParaphraseStyle s) {
    return s == ParaphraseStyle::t5_prefix ? "t5_prefix" : "instruct";
}

std::optional<ParaphraseStyle> paraphrase_style_from_string(std::string_view s) {
    if (s == "t5_prefix") return ParaphraseStyle::t5_prefix;
    if (s == "instruct") return ParaphraseStyle::instruct;
    return std::nullopt;
}

ParaphraseVerdict validate_paraphrase(std::string_view original, std::string_view candidate,
                                      const ParaphraseBounds& bounds) {
    const std::string_view trimmed = detail::trim(candidate);
    if (trimmed.empty()) return {false, "empty"};
    if (detail::to_lower(trimmed) == detail::to_lower(detail::trim(original))) {
        return {false, "identical"};
    }
    const double ratio =
        static_cast<double>(trimmed.size()) / static_cast<double>(detail::trim(original).size());
    if (ratio < bounds.min_length_ratio || ratio > bounds.max_length_ratio) {
        return {false, "length_out_of_bounds"};
    }
    return {true, ""};
}

namespace {

// A paraphrase request is a one-shot user turn; the trivial binding keeps
// mock backends total.
Transcript paraphrase_request(const std::string& item_id, std::string_view slot_tag,
                              const std::string& text, ParaphraseStyle style) {
    Transcript t;
    t.item_id = item_id + "#" + std::string(slot_tag);
    t.mode = PromptMode::Implicit;
    t.binding.symbols = {'A'};
    t.binding.permutation = {0};
    if (style == ParaphraseStyle::t5_prefix) {
        t.turns.push_back({Role::user, "paraphrase: " + text});
    } else {
        t.turns.push_back({Role::user, "Paraphrase the following sentence: " + text});
    }
    return t;
}

ParaphraseSlot paraphrase_slot(const std::string& original, const Transcript& request,
                               ModelGate& gate, const DiskCache* cache,
                               const ParaphraseBounds& bounds) {
    ParaphraseSlot slot;
    try {
        const Completion completion =
            cache ? gate.complete_cached(request, *cache) : gate.complete(request);
        const std::string candidate{detail::trim(completion.text)};
        const ParaphraseVerdict verdict = validate_paraphrase(original, candidate, bounds);
        slot.valid = verdict.valid;
        slot.reason = verdict.reason;
        slot.text = verdict.valid ? candidate : original;
    } catch (const transport_error& e) {
        slot.valid = false;
        slot.reason = std::string("transport: ") + e.what();
        slot.text = original;
    } catch (const protocol_error& e) {
        slot.valid = false;
        slot.reason = std::string("protocol: ") + e.what();
        slot.text = original;
    }
    return slot;
}

}  // namespace

AugmentedItem paraphrase_item(const McsbItem& item, ModelGate& gate, ParaphraseStyle style,
                              const DiskCache* cache, const ParaphraseBounds& bounds) {
    AugmentedItem out;
    out.original_id = item.id;
    out.generator_tag = std::string(to_string(style)) + ":" + gate.spec().id();

    if (item.context) {
        out.context = paraphrase_slot(
            *item.context, paraphrase_request(item.id, "context", *item.context, style), gate,
            cache, bounds);
    }
    for (std::size_t i = 0; i < item.choices.size(); ++i) {
        const std::string& text = item.choices[i].text;
        out.choices.push_back(paraphrase_slot(
            text, paraphrase_request(item.id, "choice" + std::to_string(i), text, style), gate,
            cache, bounds));
    }
    return out;
}

std::vector<McsbItem> apply_augmentation(std::span<const McsbItem> train,
                                         std::span<const AugmentedItem> augs) {
    std::map<std::string_view, const AugmentedItem*> by_id;
    for (const AugmentedItem& aug : augs) by_id.emplace(aug.original_id, &aug);
    for (const AugmentedItem& aug : augs) {
        const bool known = std::any_of(train.begin(), train.end(), [&](const McsbItem& item) {
            return item.id == aug.original_id;
        });
        if (!known) {
            throw precondition_error("augmentation references unknown item: " + aug.original_id);
        }
    }

    std::vector<McsbItem> out;
    out.reserve(train.size());
    for (const McsbItem& item : train) {
        const auto it = by_id.find(item.id);
        if (it == by_id.end()) {
            out.push_back(item);
            continue;
        }
        const AugmentedItem& aug = *it->second;
        McsbItem replaced = item;
        bool any = false;

        if (item.context && aug.context && aug.context->valid) {
            replaced.context = aug.context->text;
            any = true;
        }
        const std::size_t n =
            std::min(replaced.choices.size(), aug.choices.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (!aug.choices[i].valid) continue;
            // A replacement that collides with another choice text would
            // break the pairwise-distinct invariant; keep the original.
            bool collides = false;
            for (std::size_t j = 0; j < replaced.choices.size(); ++j) {
                if (j != i && replaced.choices[j].text == aug.choices[i].text) collides = true;
            }
            if (collides) continue;
            replaced.choices[i].text = aug.choices[i].text;
            any = true;
        }
        if (any) replaced.id += ":aug";
        out.push_back(std::move(replaced));
    }
    return out;
}

std::string_view to_string(FinetuneVariant v) {
    switch (v) {
        case FinetuneVariant::plain: return "plain";
        case FinetuneVariant::bow_system: return "bow_system";
        case FinetuneVariant::debias_system: return "debias_system";
    }
    return "plain";
}

std::optional<FinetuneVariant> finetune_variant_from_string(std::string_view s) {
    if (s == "plain") return FinetuneVariant::plain;
    if (s == "bow_system") return FinetuneVariant::bow_system;
    if (s == "debias_system") return FinetuneVariant::debias_system;
    return std::nullopt;
}

std::vector<FinetuneExample> export_finetune(std::span<const McsbItem> items, PromptMode mode,
                                             FinetuneVariant variant,
                                             const std::vector<std::string>& bow_words) {
    if (variant == FinetuneVariant::bow_system && bow_words.empty()) {
        throw precondition_error("bow_system export requires bow_words");
    }

    std::vector<FinetuneExample> out;
    out.reserve(items.size());
    for (const McsbItem& item : items) {
        std::vector<int> identity(item.choices.size());
        for (std::size_t i = 0; i < identity.size(); ++i) identity[i] = static_cast<int>(i);
        Transcript t = build_transcript(item, mode, identity);

        if (variant == FinetuneVariant::bow_system) {
            std::string joined;
            for (const std::string& w : bow_words) {
                if (!joined.empty()) joined += ", ";
                joined += w;
            }
            t.turns[0].content = "Words such as [" + joined +
                                 "] often signal stereotypes; weigh them carefully. " +
                                 t.turns[0].content;
        } else if (variant == FinetuneVariant::debias_system) {
            t.turns[0].content +=
                " Avoid selecting responses that express stereotypes about groups of people.";
        }

        const GoldLabel target_gold =
            mode == PromptMode::Explicit ? GoldLabel::stereotype : GoldLabel::anti_stereotype;
        const char target = t.binding.symbol_for_gold(item, target_gold);
        if (!target) {
            throw precondition_error("item " + item.id + " has no " +
                                     std::string(to_string(target_gold)) + " choice");
        }

        FinetuneExample example;
        example.messages = std::move(t.turns);
        example.messages.push_back({Role::assistant, std::string(1, target)});
        example.completion = target;
        out.push_back(std::move(example));
    }
    return out;
}

std::string finetune_example_to_json_line(const FinetuneExample& example) {
    json j;
    j["messages"] = turns_to_messages_json(example.messages);
    return j.dump();
}

void write_finetune_jsonl(const std::filesystem::path& path,
                          std::span<const FinetuneExample> examples) {
    std::string buf;
    for (const FinetuneExample& example : examples) {
        buf += finetune_example_to_json_line(example);
        buf += '\n';
    }
    detail::write_file_atomic(path, buf);
}

std::string_view to_string(JobState s) {
    switch (s) {
        case JobState::queued: return "queued";
        case JobState::running: return "running";
        case JobState::succeeded: return "succeeded";
        case JobState::failed: return "failed";
    }
    return "queued";
}

FinetuneClient::FinetuneClient(std::string endpoint_url, std::string auth_ref,
                               std::shared_ptr<Transport> transport, RetryPolicy retry)
    : endpoint_url_(std::move(endpoint_url)),
      auth_ref_(std::move(auth_ref)),
      transport_(std::move(transport)),
      retry_(retry) {
    if (endpoint_url_.empty()) throw config_error("fine-tune endpoint_url must be set");
    while (!endpoint_url_.empty() && endpoint_url_.back() == '/') endpoint_url_.pop_back();
    if (!transport_) transport_ = make_http_transport();
}

HttpHeaders FinetuneClient::auth_headers() const {
    HttpHeaders headers;
    if (!auth_ref_.empty()) {
        const char* secret = std::getenv(auth_ref_.c_str());
        if (!secret || !*secret) {
            throw config_error("credential env var \"" + auth_ref_ + "\" is not set");
        }
        headers.emplace_back("Authorization", std::string("Bearer ") + secret);
    }
    return headers;
}

HttpResponse FinetuneClient::request_with_retry(bool is_post, const std::string& url,
                                                const std::string& body,
                                                const HttpHeaders& headers) {
    HttpResponse response;
    auto delay = retry_.initial_delay;
    for (int attempt = 1; attempt <= retry_.max_attempts; ++attempt) {
        response = is_post ? transport_->post(url, body, headers) : transport_->get(url, headers);
        const bool retryable =
            response.status == 0 || response.status == 429 || response.status >= 500;
        if (!retryable) return response;
        if (attempt == retry_.max_attempts) {
            throw transport_error("request to " + url + " failed after " +
                                  std::to_string(retry_.max_attempts) + " attempts, last status " +
                                  std::to_string(response.status) + ": " +
                                  response.body.substr(0, 200));
        }
        std::this_thread::sleep_for(delay);
        delay = std::chrono::milliseconds(
            static_cast<std::int64_t>(static_cast<double>(delay.count()) * retry_.backoff_factor));
    }
    return response;
}

std::string FinetuneClient::submit(const std::filesystem::path& training_file,
                                   const std::string& model_name) {
    const std::string content = detail::read_file(training_file);

    // Multipart upload with a fixed boundary keeps request bytes reproducible.
    static constexpr const char* boundary = "biasaudit-upload-boundary";
    std::string body;
    body += std::string("--") + boundary + "\r\n";
    body += "Content-Disposition: form-data; name=\"purpose\"\r\n\r\nfine-tune\r\n";
    body += std::string("--") + boundary + "\r\n";
    body += "Content-Disposition: form-data; name=\"file\"; filename=\"" +
            training_file.filename().string() + "\"\r\n";
    body += "Content-Type: application/jsonl\r\n\r\n";
    body += content;
    body += std::string("\r\n--") + boundary + "--\r\n";

    HttpHeaders headers = auth_headers();
    headers.emplace_back("Content-Type", std::string("multipart/form-data; boundary=") + boundary);

    const HttpResponse upload = request_with_retry(true, endpoint_url_ + "/files", body, headers);
    if (upload.status != 200) {
        throw transport_error("file upload rejected (status " + std::to_string(upload.status) +
                              "): " + upload.body);
    }
    const json upload_reply = json::parse(upload.body, nullptr, false);
    if (upload_reply.is_discarded() || !upload_reply.contains("id")) {
        throw protocol_error("upload reply missing file id: " + upload.body.substr(0, 200));
    }
    const std::string file_id = upload_reply["id"].get<std::string>();

    json job_body;
    job_body["training_file"] = file_id;
    job_body["model"] = model_name;
    HttpHeaders job_headers = auth_headers();
    job_headers.emplace_back("Content-Type", "application/json");
    const HttpResponse job = request_with_retry(true, endpoint_url_ + "/fine_tuning/jobs",
                                                job_body.dump(), job_headers);
    if (job.status != 200) {
        throw transport_error("fine-tune job rejected (status " + std::to_string(job.status) +
                              "): " + job.body);
    }
    const json job_reply = json::parse(job.body, nullptr, false);
    if (job_reply.is_discarded() || !job_reply.contains("id")) {
        throw protocol_error("job reply missing id: " + job.body.substr(0, 200));
    }
    return job_reply["id"].get<std::string>();
}

JobStatus FinetuneClient::poll(const std::string& job_id) {
    const HttpResponse response =
        request_with_retry(false, endpoint_url_ + "/fine_tuning/jobs/" + job_id, "", auth_headers());
    if (response.status == 404) return {JobState::failed, "", "not_found"};
    if (response.status != 200) {
        throw transport_error("poll failed (status " + std::to_string(response.status) + "): " +
                              response.body.substr(0, 200));
    }
    const json reply = json::parse(response.body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("status")) {
        throw protocol_error("poll reply missing status: " + response.body.substr(0, 200));
    }
    const std::string status = reply["status"].get<std::string>();
    if (status == "succeeded") {
        return {JobState::succeeded, reply.value("fine_tuned_model", std::string{}), ""};
    }
    if (status == "failed" || status == "cancelled") {
        std::string reason = status;
        if (reply.contains("error") && reply["error"].is_object()) {
            reason = reply["error"].value("message", status);
        }
        return {JobState::failed, "", reason};
    }
    if (status == "running") return {JobState::running, "", ""};
    // validating_files / queued / created all map to queued
    return {JobState::queued, "", ""};
}

}  // namespace biasaudit
