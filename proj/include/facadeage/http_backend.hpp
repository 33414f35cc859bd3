#pragma once

#include <cstdlib>
#include <string>

#include <json.hpp>

#include "facadeage/detail/httplib.hpp"
#include "facadeage/errors.hpp"
#include "facadeage/gateway.hpp"

namespace facadeage {

/// OpenAI-compatible chat-completions transport. The instruction goes out as
/// a single user-role message with two content parts: the text, then the
/// image as a base64 data URL. Only the extracted reply text matters
/// downstream; the wire encoding itself carries no bit-exactness contract.
class HttpBackend : public Backend {
public:
    explicit HttpBackend(BackendConfig config) : config_(std::move(config)) {
        split_endpoint(config_.endpoint_url, origin_, path_);
    }

    Exchange send(const ClassificationRequest& request) override {
        const char* key = std::getenv(config_.api_key_env.c_str());
        if (!key || !*key) {
            throw AuthError("API key environment variable " + config_.api_key_env + " is not set");
        }

        const nlohmann::json body{
            {"model", config_.model_name},
            {"messages",
             {{{"role", "user"},
               {"content",
                {{{"type", "text"}, {"text", request.instruction_text}},
                 {{"type", "image_url"},
                  {"image_url",
                   {{"url", "data:image/" + std::string(media_type_name(request.image.media_type)) +
                                ";base64," + request.image.payload}}}}}}}}},
            {"temperature", config_.effective_temperature()},
            {"max_tokens", config_.max_output_tokens}};

        httplib::Client client(origin_);
        client.set_connection_timeout(std::chrono::duration<double>(config_.request_timeout_seconds));
        client.set_read_timeout(std::chrono::duration<double>(config_.request_timeout_seconds));
        client.set_write_timeout(std::chrono::duration<double>(config_.request_timeout_seconds));
        httplib::Headers headers{{"Authorization", "Bearer " + std::string(key)}};

        auto res = client.Post(path_, headers, body.dump(), "application/json");
        if (!res) {
            const auto err = res.error();
            if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
                err == httplib::Error::Write) {
                throw TimeoutError("request timed out: " + httplib::to_string(err));
            }
            throw TransportError("transport failure: " + httplib::to_string(err));
        }
        if (res->status == 401 || res->status == 403) {
            throw AuthError("authentication rejected (HTTP " + std::to_string(res->status) + ")");
        }
        if (res->status == 429) {
            throw RateLimitedError("rate limited (HTTP 429)");
        }
        if (res->status == 408) {
            throw TimeoutError("request timed out (HTTP 408)");
        }
        if (res->status >= 500) {
            throw TransportError("server error (HTTP " + std::to_string(res->status) + ")");
        }
        if (res->status != 200) {
            throw GatewayError("unexpected HTTP status " + std::to_string(res->status) + ": " +
                               res->body.substr(0, 200));
        }
        return parse_completion(res->body);
    }

    std::string id() const override { return "openai-chat:" + config_.model_name; }

private:
    static void split_endpoint(const std::string& url, std::string& origin, std::string& path) {
        const auto scheme_end = url.find("://");
        const auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
        const auto path_start = url.find('/', host_start);
        if (path_start == std::string::npos) {
            origin = url;
            path = "/";
        } else {
            origin = url.substr(0, path_start);
            path = url.substr(path_start);
        }
    }

    static Exchange parse_completion(const std::string& body) {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(body);
        } catch (const nlohmann::json::parse_error& e) {
            throw TransportError(std::string("unparseable completion body: ") + e.what());
        }
        if (!doc.contains("choices") || !doc["choices"].is_array() || doc["choices"].empty()) {
            throw TransportError("completion body has no choices");
        }
        const auto& choice = doc["choices"][0];
        Exchange exchange;
        if (choice.contains("message") && choice["message"].contains("content") &&
            choice["message"]["content"].is_string()) {
            exchange.text = choice["message"]["content"].get<std::string>();
        }
        exchange.refused = choice.value("finish_reason", "") == "content_filter";
        if (doc.contains("usage") && doc["usage"].is_object()) {
            exchange.usage = TokenUsage{doc["usage"].value("prompt_tokens", 0LL),
                                        doc["usage"].value("completion_tokens", 0LL)};
        }
        return exchange;
    }

    BackendConfig config_;
    std::string origin_;
    std::string path_;
};

}  // namespace facadeage
