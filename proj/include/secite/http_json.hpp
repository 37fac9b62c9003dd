#ifndef SECITE_HTTP_JSON_HPP
#define SECITE_HTTP_JSON_HPP

#include <chrono>
#include <cstdlib>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "secite/util.hpp"

namespace secite {

struct HttpEndpoint {
    std::string base_url;       // e.g. "http://127.0.0.1:8080" or with a path prefix
    std::string auth_env_var;   // bearer token read from this env var, if set
    std::chrono::milliseconds timeout{10000};
    int max_retries = 3;
    std::chrono::milliseconds backoff{250};
};

namespace detail {

struct SplitUrl {
    std::string scheme_host_port;
    std::string path_prefix;
};

inline SplitUrl split_base_url(const std::string& base_url) {
    SplitUrl out;
    const std::size_t scheme = base_url.find("://");
    const std::size_t path_start =
        base_url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    if (path_start == std::string::npos) {
        out.scheme_host_port = base_url;
    } else {
        out.scheme_host_port = base_url.substr(0, path_start);
        out.path_prefix = base_url.substr(path_start);
        while (!out.path_prefix.empty() && out.path_prefix.back() == '/') out.path_prefix.pop_back();
    }
    return out;
}

}  // namespace detail

// POST a JSON body to {base_url}{path} and parse the JSON reply. Non-2xx and
// transport errors retry with exponential backoff; exhausting the retries
// throws with the endpoint and last status in the message.
inline nlohmann::json post_json(const HttpEndpoint& ep, const std::string& path,
                                const nlohmann::json& body) {
    const auto url = detail::split_base_url(ep.base_url);
    httplib::Client client(url.scheme_host_port);
    client.set_connection_timeout(ep.timeout);
    client.set_read_timeout(ep.timeout);
    client.set_write_timeout(ep.timeout);

    httplib::Headers headers;
    if (!ep.auth_env_var.empty()) {
        if (const char* token = std::getenv(ep.auth_env_var.c_str())) {
            headers.emplace("Authorization", std::string("Bearer ") + token);
        }
    }

    const std::string payload = body.dump();
    std::string last_error = "no attempt made";
    const int attempts = ep.max_retries + 1;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) {
            const auto delay = ep.backoff * (1 << (attempt - 1));
            std::this_thread::sleep_for(delay);
        }
        auto res = client.Post(url.path_prefix + path, headers, payload, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status < 200 || res->status >= 300) {
            last_error = "HTTP status " + std::to_string(res->status);
            continue;
        }
        try {
            return nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::parse_error& e) {
            last_error = std::string("invalid JSON response: ") + e.what();
            continue;
        }
    }
    throw std::runtime_error("POST " + ep.base_url + path + " failed after " +
                             std::to_string(attempts) + " attempts (" + last_error + ")");
}

}  // namespace secite

#endif  // SECITE_HTTP_JSON_HPP
