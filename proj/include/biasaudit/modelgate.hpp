#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "biasaudit/prompting.hpp"
#include "biasaudit/types.hpp"

namespace biasaudit {

enum class BackendKind { openai_http, mock_first, mock_gold, mock_uniform };

std::string_view to_string(BackendKind k);
std::optional<BackendKind> backend_kind_from_string(std::string_view s);

struct BackendSpec {
    BackendKind kind = BackendKind::mock_first;
    std::string endpoint_url;  // openai_http only
    std::string model_name;    // openai_http only
    double temperature = 0.0;
    int max_in_flight = 4;
    std::string auth_ref;     // name of the env var holding the credential
    std::uint64_t seed = 0;   // mock_uniform draw stream

    // Short identity tag for records: "mock_gold", "openai_http:gpt-x", ...
    std::string id() const;
};

struct TokenUsage {
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
    std::int64_t total_tokens = 0;
};

struct Completion {
    std::string text;
    std::int64_t latency_ms = 0;
    bool from_cache = false;
    std::optional<TokenUsage> usage;
};

struct HttpResponse {
    int status = 0;  // 0 = transport-level failure, body holds the error
    std::string body;
};

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

// Minimal HTTP surface so tests can substitute scripted, counting, or
// poisoned transports. Mock backends never touch a transport at all.
class Transport {
public:
    virtual ~Transport() = default;
    virtual HttpResponse post(const std::string& url, const std::string& body,
                              const HttpHeaders& headers) = 0;
    virtual HttpResponse get(const std::string& url, const HttpHeaders& headers) = 0;
};

// httplib-backed transport; https URLs use TLS.
std::unique_ptr<Transport> make_http_transport();

struct RetryPolicy {
    int max_attempts = 4;  // total attempts, including the first
    std::chrono::milliseconds initial_delay{250};
    double backoff_factor = 2.0;
};

// Content-addressed digest over (kind, endpoint_url, model_name, temperature,
// canonicalized turns). Independent of max_in_flight, auth_ref, and clock.
std::string cache_key(const BackendSpec& spec, const Transcript& transcript);

// Directory of files named <key>.json, each holding the serialized Completion
// plus the request body for audit. Corrupt entries count as misses.
class DiskCache {
public:
    explicit DiskCache(std::filesystem::path dir);

    std::optional<Completion> lookup(const std::string& key) const;
    void store(const std::string& key, const Completion& completion,
               const std::string& request_body) const;

    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
};

using GoldSymbolMap = std::map<GoldLabel, char>;

class ModelGate {
public:
    // transport may be null for mock kinds; openai_http defaults to the
    // real HTTP transport when none is given.
    explicit ModelGate(BackendSpec spec, std::shared_ptr<Transport> transport = nullptr,
                       RetryPolicy retry = {});

    // One completion for a transcript. hidden_gold (symbol per gold label) is
    // required by mock_gold and ignored by every other kind; real backends
    // never see gold labels.
    Completion complete(const Transcript& transcript,
                        const std::optional<GoldSymbolMap>& hidden_gold = std::nullopt);

    // Cache wrapper: hit -> stored completion with from_cache=true and no
    // transport activity; miss -> complete() then persist.
    Completion complete_cached(const Transcript& transcript, const DiskCache& cache,
                               const std::optional<GoldSymbolMap>& hidden_gold = std::nullopt);

    const BackendSpec& spec() const { return spec_; }
    std::int64_t attempts_made() const;  // cumulative transport attempts

private:
    Completion complete_http(const Transcript& transcript);

    BackendSpec spec_;
    std::shared_ptr<Transport> transport_;
    RetryPolicy retry_;

    // Bounds in-flight transport requests to spec_.max_in_flight.
    mutable std::mutex mu_;
    mutable std::condition_variable slot_free_;
    int in_flight_ = 0;
    std::int64_t attempts_ = 0;
};

}  // namespace biasaudit
