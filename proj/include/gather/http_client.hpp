#pragma once
// OpenAI-style chat-completion client over cpp-httplib.
//
// POST {base_url}/chat/completions with
//   {"model", "temperature", "messages": [{"role":"system"}, {"role":"user"}]}
// and reads choices[0].message.content. The bearer token comes from an
// environment variable, never from configuration files.

#include <chrono>
#include <cstdlib>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "gather/annotate.hpp"
#include "gather/error.hpp"

namespace gather {

class HttpChatClient : public LlmClient {
public:
    explicit HttpChatClient(HttpClientConfig config) : config_(std::move(config)) {
        auto scheme_end = config_.base_url.find("://");
        if (scheme_end == std::string::npos) throw ConfigError("LLM base URL needs a scheme: " + config_.base_url);
        auto scheme = config_.base_url.substr(0, scheme_end);
        if (scheme != "http" && scheme != "https") throw ConfigError("unsupported LLM URL scheme '" + scheme + "'");
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
        if (scheme == "https") throw ConfigError("this build has no TLS support; use an http:// endpoint");
#endif
        auto path_start = config_.base_url.find('/', scheme_end + 3);
        origin_ = config_.base_url.substr(0, path_start);
        path_ = path_start == std::string::npos ? std::string{} : config_.base_url.substr(path_start);
        while (!path_.empty() && path_.back() == '/') path_.pop_back();
        path_ += "/chat/completions";
        if (const char* token = std::getenv(config_.token_env.c_str())) token_ = token;
    }

    LlmResponse complete(const LlmRequest& request) override {
        nlohmann::json body;
        body["model"] = request.model;
        body["temperature"] = request.temperature;
        body["messages"] = nlohmann::json::array({
            {{"role", "system"}, {"content", request.system_prompt}},
            {{"role", "user"}, {"content", request.user_prompt}},
        });

        httplib::Client cli(origin_);
        const auto timeout = std::chrono::milliseconds(config_.timeout_ms);
        cli.set_connection_timeout(timeout);
        cli.set_read_timeout(timeout);
        cli.set_write_timeout(timeout);
        httplib::Headers headers;
        if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);

        auto res = cli.Post(path_, headers, body.dump(), "application/json");
        if (!res) throw TransportError("request to " + origin_ + path_ + " failed: " + httplib::to_string(res.error()));
        if (res->status < 200 || res->status >= 300)
            throw TransportError("LLM endpoint returned HTTP " + std::to_string(res->status));

        nlohmann::json j;
        try {
            j = nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::parse_error& e) {
            throw TransportError(std::string("LLM endpoint returned invalid JSON: ") + e.what());
        }
        LlmResponse out;
        try {
            out.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception&) {
            throw TransportError("LLM response has no choices[0].message.content");
        }
        if (j.contains("usage") && j["usage"].is_object()) {
            const auto& u = j["usage"];
            if (u.contains("prompt_tokens")) out.prompt_tokens = u["prompt_tokens"].get<long>();
            if (u.contains("completion_tokens")) out.completion_tokens = u["completion_tokens"].get<long>();
        }
        return out;
    }

private:
    HttpClientConfig config_;
    std::string origin_;
    std::string path_;
    std::string token_;
};

}  // namespace gather
