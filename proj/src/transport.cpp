#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "biasaudit/modelgate.hpp"

namespace biasaudit {

namespace {

struct SplitUrl {
    std::string base;
    std::string path;
};

std::optional<SplitUrl> split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) return std::nullopt;
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return SplitUrl{url, "/"};
    return SplitUrl{url.substr(0, path_start), url.substr(path_start)};
}

class HttplibTransport : public Transport {
public:
    HttpResponse post(const std::string& url, const std::string& body,
                      const HttpHeaders& headers) override {
        const auto split = split_url(url);
        if (!split) return {0, "malformed url (missing scheme): " + url};

        httplib::Client client(split->base);
        client.set_connection_timeout(30);
        client.set_read_timeout(120);

        httplib::Headers hl_headers;
        std::string content_type = "application/json";
        for (const auto& [name, value] : headers) {
            if (name == "Content-Type") {
                content_type = value;
            } else {
                hl_headers.emplace(name, value);
            }
        }

        auto result = client.Post(split->path, hl_headers, body, content_type);
        if (!result) return {0, httplib::to_string(result.error())};
        return {result->status, result->body};
    }

    HttpResponse get(const std::string& url, const HttpHeaders& headers) override {
        const auto split = split_url(url);
        if (!split) return {0, "malformed url (missing scheme): " + url};

        httplib::Client client(split->base);
        client.set_connection_timeout(30);
        client.set_read_timeout(120);

        httplib::Headers hl_headers;
        for (const auto& [name, value] : headers) hl_headers.emplace(name, value);

        auto result = client.Get(split->path, hl_headers);
        if (!result) return {0, httplib::to_string(result.error())};
        return {result->status, result->body};
    }
};

}  // namespace

std::unique_ptr<Transport> make_http_transport() { return std::make_unique<HttplibTransport>(); }

}  // namespace biasaudit
