#pragma once

#include <atomic>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "biasaudit/modelgate.hpp"

namespace biasaudit::testsupport {

// OpenAI-shaped chat reply body for a given assistant text.
inline std::string chat_reply(const std::string& text) {
    nlohmann::json j;
    j["choices"] = {{{"message", {{"role", "assistant"}, {"content", text}}}}};
    j["usage"] = {{"prompt_tokens", 12}, {"completion_tokens", 1}, {"total_tokens", 13}};
    return j.dump();
}

// Transport driven by lambdas; counts calls and remembers request bodies.
class LambdaTransport : public biasaudit::Transport {
public:
    using PostFn = std::function<biasaudit::HttpResponse(const std::string&, const std::string&,
                                                         const biasaudit::HttpHeaders&)>;
    using GetFn =
        std::function<biasaudit::HttpResponse(const std::string&, const biasaudit::HttpHeaders&)>;

    explicit LambdaTransport(PostFn on_post = nullptr, GetFn on_get = nullptr)
        : on_post_(std::move(on_post)), on_get_(std::move(on_get)) {}

    biasaudit::HttpResponse post(const std::string& url, const std::string& body,
                                 const biasaudit::HttpHeaders& headers) override {
        posts.fetch_add(1);
        {
            std::lock_guard lock(mu_);
            post_bodies.push_back(body);
            post_urls.push_back(url);
        }
        if (!on_post_) return {200, chat_reply("A")};
        return on_post_(url, body, headers);
    }

    biasaudit::HttpResponse get(const std::string& url,
                                const biasaudit::HttpHeaders& headers) override {
        gets.fetch_add(1);
        if (!on_get_) return {404, "{}"};
        return on_get_(url, headers);
    }

    std::atomic<int> posts{0};
    std::atomic<int> gets{0};
    std::vector<std::string> post_bodies;
    std::vector<std::string> post_urls;

private:
    std::mutex mu_;
    PostFn on_post_;
    GetFn on_get_;
};

// Fails the test run if any network activity happens at all.
class PoisonedTransport : public biasaudit::Transport {
public:
    biasaudit::HttpResponse post(const std::string&, const std::string&,
                                 const biasaudit::HttpHeaders&) override {
        touched.store(true);
        throw std::logic_error("poisoned transport used");
    }
    biasaudit::HttpResponse get(const std::string&, const biasaudit::HttpHeaders&) override {
        touched.store(true);
        throw std::logic_error("poisoned transport used");
    }

    std::atomic<bool> touched{false};
};

}  // namespace biasaudit::testsupport
