#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include <json.hpp>

#include "facadeage/detail/io.hpp"
#include "facadeage/errors.hpp"
#include "facadeage/gateway.hpp"

namespace facadeage {

/// Scripted replies for offline, deterministic runs. Entries are looked up
/// by item id first, then by source digest; unknown items receive the
/// default reply. An entry may script transient failures (fail_times), a
/// refusal, a fixed latency and token usage.
struct MockScript {
    struct Entry {
        std::string text;
        double latency_seconds = 0.0;
        std::optional<TokenUsage> usage;
        int fail_times = 0;
        bool refuse = false;
    };

    std::map<int, Entry> by_id;
    std::map<std::string, Entry> by_digest;
    Entry default_entry;

    MockScript() { default_entry.text = R"({"age": "1980-1999", "reason": ""})"; }
};

class MockBackend : public Backend {
public:
    explicit MockBackend(MockScript script) : script_(std::move(script)) {}

    static MockBackend from_fixture_file(const std::filesystem::path& path) {
        return MockBackend(script_from_file(path));
    }

    /// Loads a fixture file:
    /// {"default": {...}, "replies": {"<id>": <entry>}, "replies_by_digest": {"<hex>": <entry>}}
    /// where <entry> is either a reply string or
    /// {"text": ..., "latency": ..., "usage": {"input": n, "output": n}, "fail_times": n, "refuse": bool}.
    static MockScript script_from_file(const std::filesystem::path& path) {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(detail::read_text_file(path));
        } catch (const nlohmann::json::parse_error& e) {
            throw MalformedManifestError("mock fixture " + path.string() + ": " + e.what());
        }
        MockScript script;
        if (doc.contains("default")) script.default_entry = parse_entry(doc["default"]);
        if (doc.contains("replies")) {
            for (const auto& [key, value] : doc["replies"].items()) {
                script.by_id[std::stoi(key)] = parse_entry(value);
            }
        }
        if (doc.contains("replies_by_digest")) {
            for (const auto& [key, value] : doc["replies_by_digest"].items()) {
                script.by_digest[key] = parse_entry(value);
            }
        }
        return script;
    }

    Exchange send(const ClassificationRequest& request) override {
        const MockScript::Entry* entry = &script_.default_entry;
        if (auto it = script_.by_id.find(request.item_id); it != script_.by_id.end()) {
            entry = &it->second;
        } else if (auto dit = script_.by_digest.find(request.image.source_digest); dit != script_.by_digest.end()) {
            entry = &dit->second;
        }
        {
            std::lock_guard lock(mutex_);
            ++calls_;
            auto& failures_left = remaining_failures_.try_emplace(request.item_id, entry->fail_times).first->second;
            if (failures_left > 0) {
                --failures_left;
                throw RateLimitedError("scripted transient failure for item " + std::to_string(request.item_id));
            }
        }
        Exchange exchange;
        exchange.text = entry->text;
        exchange.usage = entry->usage;
        exchange.refused = entry->refuse;
        exchange.scripted_latency = entry->latency_seconds;
        return exchange;
    }

    std::string id() const override { return "mock"; }

    int calls() const {
        std::lock_guard lock(mutex_);
        return calls_;
    }

private:
    static MockScript::Entry parse_entry(const nlohmann::json& value) {
        MockScript::Entry entry;
        if (value.is_string()) {
            entry.text = value.get<std::string>();
            return entry;
        }
        entry.text = value.value("text", "");
        entry.latency_seconds = value.value("latency", 0.0);
        if (value.contains("usage") && value["usage"].is_object()) {
            entry.usage = TokenUsage{value["usage"].value("input", 0LL), value["usage"].value("output", 0LL)};
        }
        entry.fail_times = value.value("fail_times", 0);
        entry.refuse = value.value("refuse", false);
        return entry;
    }

    MockScript script_;
    mutable std::mutex mutex_;
    int calls_ = 0;
    std::map<int, int> remaining_failures_;
};

}  // namespace facadeage
