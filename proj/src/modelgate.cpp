#include "biasaudit/modelgate.hpp"

#include <cstdlib>
#include <iostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "biasaudit/detail/io.hpp"
#include "biasaudit/detail/rng.hpp"
#include "biasaudit/detail/sha256.hpp"

namespace biasaudit {

using nlohmann::json;

std::string_view to_string(BackendKind k) {
    switch (k) {
        case BackendKind::openai_http: return "openai_http";
        case BackendKind::mock_first: return "mock_first";
        case BackendKind::mock_gold: return "mock_gold";
        case BackendKind::mock_uniform: return "mock_uniform";
    }
    return "mock_first";
}

std::optional<BackendKind> backend_kind_from_string(std::string_view s) {
    if (s == "openai_http") return BackendKind::openai_http;
    if (s == "mock_first") return BackendKind::mock_first;
    if (s == "mock_gold") return BackendKind::mock_gold;
    if (s == "mock_uniform") return BackendKind::mock_uniform;
    return std::nullopt;
}

std::string BackendSpec::id() const {
    std::string out{to_string(kind)};
    if (!model_name.empty()) out += ":" + model_name;
    return out;
}

std::string cache_key(const BackendSpec& spec, const Transcript& transcript) {
    json canon;
    canon["kind"] = std::string(to_string(spec.kind));
    canon["endpoint_url"] = spec.endpoint_url;
    canon["model_name"] = spec.model_name;
    canon["temperature"] = spec.temperature;
    canon["turns"] = turns_to_messages_json(transcript.turns);
    return detail::sha256_hex(canon.dump());
}

DiskCache::DiskCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::optional<Completion> DiskCache::lookup(const std::string& key) const {
    const auto path = dir_ / (key + ".json");
    if (!std::filesystem::exists(path)) return std::nullopt;
    try {
        const json j = json::parse(detail::read_file(path));
        const json& c = j.at("completion");
        Completion out;
        out.text = c.at("text").get<std::string>();
        out.latency_ms = c.at("latency_ms").get<std::int64_t>();
        if (c.contains("usage")) {
            TokenUsage usage;
            usage.prompt_tokens = c["usage"].value("prompt_tokens", std::int64_t{0});
            usage.completion_tokens = c["usage"].value("completion_tokens", std::int64_t{0});
            usage.total_tokens = c["usage"].value("total_tokens", std::int64_t{0});
            out.usage = usage;
        }
        out.from_cache = true;
        return out;
    } catch (const std::exception& e) {
        std::cerr << "[modelgate] warning: corrupt cache entry " << path.string() << " (" << e.what()
                  << "), treating as miss\n";
        return std::nullopt;
    }
}

void DiskCache::store(const std::string& key, const Completion& completion,
                      const std::string& request_body) const {
    json c;
    c["text"] = completion.text;
    c["latency_ms"] = completion.latency_ms;
    if (completion.usage) {
        c["usage"] = {{"prompt_tokens", completion.usage->prompt_tokens},
                      {"completion_tokens", completion.usage->completion_tokens},
                      {"total_tokens", completion.usage->total_tokens}};
    }
    json entry;
    entry["completion"] = std::move(c);
    json request = json::parse(request_body, nullptr, false);
    entry["request"] = request.is_discarded() ? json(request_body) : request;
    detail::write_file_atomic(dir_ / (key + ".json"), entry.dump(2) + "\n");
}

ModelGate::ModelGate(BackendSpec spec, std::shared_ptr<Transport> transport, RetryPolicy retry)
    : spec_(std::move(spec)), transport_(std::move(transport)), retry_(retry) {
    if (spec_.kind == BackendKind::openai_http) {
        if (spec_.endpoint_url.empty() || spec_.model_name.empty()) {
            throw config_error("openai_http backend requires endpoint_url and model_name");
        }
        if (!transport_) transport_ = make_http_transport();
    }
    if (spec_.max_in_flight < 1) throw config_error("max_in_flight must be >= 1");
}

std::int64_t ModelGate::attempts_made() const {
    std::lock_guard lock(mu_);
    return attempts_;
}

namespace {

bool retryable(const HttpResponse& r) {
    return r.status == 0 || r.status == 429 || (r.status >= 500 && r.status < 600);
}

}  // namespace

Completion ModelGate::complete_http(const Transcript& transcript) {
    std::string bearer;
    if (!spec_.auth_ref.empty()) {
        const char* secret = std::getenv(spec_.auth_ref.c_str());
        if (!secret || !*secret) {
            throw config_error("credential env var \"" + spec_.auth_ref + "\" is not set");
        }
        bearer = secret;
    }

    json body;
    body["model"] = spec_.model_name;
    body["messages"] = turns_to_messages_json(transcript.turns);
    body["temperature"] = spec_.temperature;
    const std::string payload = body.dump();

    HttpHeaders headers{{"Content-Type", "application/json"}};
    if (!bearer.empty()) headers.emplace_back("Authorization", "Bearer " + bearer);

    std::string url = spec_.endpoint_url;
    if (url.find("/chat/completions") == std::string::npos) {
        if (!url.empty() && url.back() == '/') url.pop_back();
        url += "/chat/completions";
    }

    // Bounded in-flight slot for the whole request (including retries).
    std::unique_lock lock(mu_);
    slot_free_.wait(lock, [&] { return in_flight_ < spec_.max_in_flight; });
    ++in_flight_;
    lock.unlock();
    struct SlotRelease {
        ModelGate* gate;
        ~SlotRelease() {
            std::lock_guard guard(gate->mu_);
            --gate->in_flight_;
            gate->slot_free_.notify_one();
        }
    } release{this};

    const auto started = std::chrono::steady_clock::now();
    HttpResponse response;
    auto delay = retry_.initial_delay;
    for (int attempt = 1; attempt <= retry_.max_attempts; ++attempt) {
        {
            std::lock_guard guard(mu_);
            ++attempts_;
        }
        response = transport_->post(url, payload, headers);
        if (!retryable(response)) break;
        if (attempt == retry_.max_attempts) {
            throw transport_error("request failed after " + std::to_string(retry_.max_attempts) +
                                  " attempts, last status " + std::to_string(response.status) +
                                  ": " + response.body.substr(0, 200));
        }
        std::cerr << "[modelgate] attempt " << attempt << "/" << retry_.max_attempts
                  << " got status " << response.status << ", retrying in " << delay.count()
                  << " ms\n";
        std::this_thread::sleep_for(delay);
        delay = std::chrono::milliseconds(
            static_cast<std::int64_t>(static_cast<double>(delay.count()) * retry_.backoff_factor));
    }
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - started)
                             .count();

    if (response.status != 200) {
        throw transport_error("endpoint returned status " + std::to_string(response.status) + ": " +
                              response.body.substr(0, 500));
    }

    const json reply = json::parse(response.body, nullptr, false);
    if (reply.is_discarded()) {
        throw protocol_error("endpoint returned non-JSON body: " + response.body.substr(0, 200));
    }
    if (!reply.contains("choices") || !reply["choices"].is_array() || reply["choices"].empty() ||
        !reply["choices"][0].contains("message") ||
        !reply["choices"][0]["message"].contains("content")) {
        throw protocol_error("reply missing choices[0].message.content: " +
                             reply.dump().substr(0, 200));
    }

    Completion out;
    out.text = reply["choices"][0]["message"]["content"].is_null()
                   ? std::string{}
                   : reply["choices"][0]["message"]["content"].get<std::string>();
    out.latency_ms = elapsed;
    if (reply.contains("usage") && reply["usage"].is_object()) {
        TokenUsage usage;
        usage.prompt_tokens = reply["usage"].value("prompt_tokens", std::int64_t{0});
        usage.completion_tokens = reply["usage"].value("completion_tokens", std::int64_t{0});
        usage.total_tokens = reply["usage"].value("total_tokens", std::int64_t{0});
        out.usage = usage;
    }
    return out;
}

Completion ModelGate::complete(const Transcript& transcript,
                               const std::optional<GoldSymbolMap>& hidden_gold) {
    switch (spec_.kind) {
        case BackendKind::openai_http:
            return complete_http(transcript);
        case BackendKind::mock_first:
            return {std::string(1, transcript.binding.symbols.at(0)), 0, false, std::nullopt};
        case BackendKind::mock_gold: {
            if (!hidden_gold || !hidden_gold->contains(GoldLabel::stereotype)) {
                throw precondition_error("mock_gold requires the stereotype symbol");
            }
            return {std::string(1, hidden_gold->at(GoldLabel::stereotype)), 0, false, std::nullopt};
        }
        case BackendKind::mock_uniform: {
            const std::string digest = detail::sha256_hex(turns_to_messages_json(transcript.turns).dump());
            std::mt19937_64 rng(detail::splitmix64(spec_.seed ^ detail::fnv1a(digest)));
            const auto pick = detail::uniform_below(rng, transcript.binding.symbols.size());
            return {std::string(1, transcript.binding.symbols.at(pick)), 0, false, std::nullopt};
        }
    }
    throw config_error("unknown backend kind");
}

Completion ModelGate::complete_cached(const Transcript& transcript, const DiskCache& cache,
                                      const std::optional<GoldSymbolMap>& hidden_gold) {
    const std::string key = cache_key(spec_, transcript);
    if (auto hit = cache.lookup(key)) return *hit;

    Completion fresh = complete(transcript, hidden_gold);
    json request;
    request["model"] = spec_.model_name;
    request["messages"] = turns_to_messages_json(transcript.turns);
    request["temperature"] = spec_.temperature;
    cache.store(key, fresh, request.dump());
    return fresh;
}

}  // namespace biasaudit
