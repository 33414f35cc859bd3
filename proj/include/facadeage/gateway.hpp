#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "facadeage/detail/hash.hpp"
#include "facadeage/detail/io.hpp"
#include "facadeage/errors.hpp"
#include "facadeage/prompting.hpp"

namespace facadeage {

struct TokenUsage {
    long long input = 0;
    long long output = 0;
};

/// One model reply as received, plus its accounting. Cached replies carry the
/// originally recorded latency and cost, flagged via from_cache.
struct RawReply {
    int item_id = 0;
    std::string text;
    double latency_seconds = 0.0;
    std::optional<TokenUsage> token_usage;
    double cost_estimate = 0.0;
    bool from_cache = false;
    std::string backend_id;
    bool refused = false;  // reply present but content-filtered upstream
};

struct BackendConfig {
    std::string endpoint_url = "https://api.openai.com/v1/chat/completions";
    std::string model_name = "gpt-4-vision-preview";
    std::string api_key_env = "VLM_API_KEY";
    std::optional<double> temperature;      // unset means 0 on the wire
    int max_output_tokens = 300;
    double request_timeout_seconds = 60.0;
    int max_retries = 3;
    int max_concurrency = 1;
    int min_request_interval_ms = 0;
    int retry_initial_delay_ms = 500;       // doubles per attempt
    // Pricing is configuration, not code: currency per million tokens.
    double price_per_million_input_tokens = 0.0;
    double price_per_million_output_tokens = 0.0;
    std::optional<std::filesystem::path> cache_dir;

    double effective_temperature() const { return temperature.value_or(0.0); }

    void validate() const {
        if (max_concurrency < 1) throw std::invalid_argument("max_concurrency must be >= 1");
        if (max_retries < 0) throw std::invalid_argument("max_retries must be >= 0");
        if (!(request_timeout_seconds > 0)) throw std::invalid_argument("request_timeout must be > 0");
        if (min_request_interval_ms < 0) throw std::invalid_argument("min_request_interval must be >= 0");
    }
};

/// Transport interface. Implementations must be safely shareable across
/// concurrent in-flight requests; latency is measured by the dispatcher
/// unless the backend scripts its own (deterministic mock runs).
class Backend {
public:
    struct Exchange {
        std::string text;
        std::optional<TokenUsage> usage;
        bool refused = false;
        std::optional<double> scripted_latency;
    };

    virtual ~Backend() = default;
    virtual Exchange send(const ClassificationRequest& request) = 0;
    virtual std::string id() const = 0;
};

/// Content-addressed reply store: one JSON record per key under
/// <root>/<first-2-hex-of-key>/<key>.json, written via atomic rename so
/// concurrent writers are safe (identical keys hold identical values).
class ReplyCache {
public:
    explicit ReplyCache(std::filesystem::path root) : root_(std::move(root)) {}

    static std::string key_for(const ClassificationRequest& request, const BackendConfig& config) {
        std::string material = request.image.source_digest;
        material += '\n';
        material += request.instruction_text;
        material += '\n';
        material += config.model_name;
        material += '\n';
        material += std::to_string(config.effective_temperature());
        return detail::sha256_hex(material);
    }

    std::filesystem::path path_for(const std::string& key) const {
        return root_ / key.substr(0, 2) / (key + ".json");
    }

    std::optional<RawReply> lookup(const std::string& key, int item_id) const {
        const auto path = path_for(key);
        if (!std::filesystem::exists(path)) return std::nullopt;
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(detail::read_text_file(path));
        } catch (const std::exception&) {
            return std::nullopt;  // unreadable record behaves like a miss
        }
        RawReply reply;
        reply.item_id = item_id;
        reply.text = doc.value("text", "");
        reply.latency_seconds = doc.value("latency_seconds", 0.0);
        if (doc.contains("token_usage") && doc["token_usage"].is_object()) {
            reply.token_usage = TokenUsage{doc["token_usage"].value("input", 0LL),
                                           doc["token_usage"].value("output", 0LL)};
        }
        reply.cost_estimate = doc.value("cost_estimate", 0.0);
        reply.backend_id = doc.value("backend_id", "");
        reply.refused = doc.value("refused", false);
        reply.from_cache = true;
        return reply;
    }

    void store(const std::string& key, const RawReply& reply) const {
        nlohmann::json doc{{"text", reply.text},
                           {"latency_seconds", reply.latency_seconds},
                           {"cost_estimate", reply.cost_estimate},
                           {"backend_id", reply.backend_id},
                           {"refused", reply.refused}};
        if (reply.token_usage) {
            doc["token_usage"] = {{"input", reply.token_usage->input}, {"output", reply.token_usage->output}};
        }
        detail::write_file_atomic(path_for(key), doc.dump(2) + "\n");
    }

private:
    std::filesystem::path root_;
};

struct BatchFailure {
    int item_id = 0;
    std::string error;
};

struct BatchEntry {
    std::optional<RawReply> reply;
    std::optional<BatchFailure> failure;
};

struct BatchResult {
    std::vector<BatchEntry> entries;  // entries[i] answers requests[i]
    double total_new_cost = 0.0;      // sum over non-cached replies only
    double total_latency_seconds = 0.0;
    int backend_calls = 0;
    int cache_hits = 0;
    int retries = 0;

    bool all_ok() const {
        for (const auto& e : entries)
            if (!e.reply) return false;
        return true;
    }
};

/// Dispatcher owning retry, rate limiting, caching and cost accounting.
class Gateway {
public:
    Gateway(BackendConfig config, Backend& backend) : config_(std::move(config)), backend_(&backend) {
        config_.validate();
        if (config_.cache_dir) cache_.emplace(*config_.cache_dir);
    }

    const BackendConfig& config() const noexcept { return config_; }
    int backend_calls() const noexcept { return backend_calls_.load(); }
    int cache_hits() const noexcept { return cache_hits_.load(); }
    int retries() const noexcept { return retries_.load(); }

    /// One request: cache first, then dispatch with exponential backoff on
    /// retryable failures. The reply text is kept verbatim.
    RawReply classify(const ClassificationRequest& request) {
        std::string key;
        if (cache_) {
            key = ReplyCache::key_for(request, config_);
            if (auto hit = cache_->lookup(key, request.item_id)) {
                cache_hits_.fetch_add(1);
                return *hit;
            }
        }
        RawReply reply = dispatch_with_retry(request);
        if (cache_) cache_->store(key, reply);
        return reply;
    }

    /// Dispatches every request, preserving input order in the result and
    /// never aborting the batch on a single item failure. At most
    /// max_concurrency requests are in flight; consecutive dispatches are
    /// separated by at least min_request_interval.
    BatchResult run_batch(const std::vector<ClassificationRequest>& requests) {
        if (requests.empty()) throw std::invalid_argument("run_batch requires a non-empty request list");
        BatchResult result;
        result.entries.resize(requests.size());

        const int workers = std::min<int>(config_.max_concurrency, static_cast<int>(requests.size()));
        std::atomic<std::size_t> next{0};
        auto work = [&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= requests.size()) return;
                try {
                    result.entries[i].reply = classify(requests[i]);
                } catch (const std::exception& e) {
                    result.entries[i].failure = BatchFailure{requests[i].item_id, e.what()};
                }
            }
        };

        const int calls_before = backend_calls_.load();
        const int hits_before = cache_hits_.load();
        const int retries_before = retries_.load();
        if (workers == 1) {
            work();
        } else {
            std::vector<std::thread> pool;
            pool.reserve(static_cast<std::size_t>(workers));
            for (int w = 0; w < workers; ++w) pool.emplace_back(work);
            for (auto& t : pool) t.join();
        }

        for (const auto& entry : result.entries) {
            if (!entry.reply) continue;
            result.total_latency_seconds += entry.reply->latency_seconds;
            if (!entry.reply->from_cache) result.total_new_cost += entry.reply->cost_estimate;
        }
        result.backend_calls = backend_calls_.load() - calls_before;
        result.cache_hits = cache_hits_.load() - hits_before;
        result.retries = retries_.load() - retries_before;
        return result;
    }

private:
    double cost_for(const std::optional<TokenUsage>& usage) const {
        if (!usage) return 0.0;
        return static_cast<double>(usage->input) / 1e6 * config_.price_per_million_input_tokens +
               static_cast<double>(usage->output) / 1e6 * config_.price_per_million_output_tokens;
    }

    void wait_for_dispatch_slot() {
        if (config_.min_request_interval_ms <= 0) return;
        const auto interval = std::chrono::milliseconds(config_.min_request_interval_ms);
        std::chrono::steady_clock::time_point scheduled;
        {
            std::lock_guard lock(throttle_mutex_);
            const auto now = std::chrono::steady_clock::now();
            scheduled = std::max(now, next_dispatch_);
            next_dispatch_ = scheduled + interval;
        }
        std::this_thread::sleep_until(scheduled);
    }

    RawReply dispatch_with_retry(const ClassificationRequest& request) {
        auto delay = std::chrono::milliseconds(std::max(0, config_.retry_initial_delay_ms));
        for (int attempt = 0;; ++attempt) {
            try {
                wait_for_dispatch_slot();
                backend_calls_.fetch_add(1);
                const auto t0 = std::chrono::steady_clock::now();
                const auto exchange = backend_->send(request);
                const auto measured = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

                RawReply reply;
                reply.item_id = request.item_id;
                reply.text = exchange.text;
                reply.latency_seconds = exchange.scripted_latency.value_or(measured);
                reply.token_usage = exchange.usage;
                reply.cost_estimate = cost_for(exchange.usage);
                reply.backend_id = backend_->id();
                reply.refused = exchange.refused;
                return reply;
            } catch (const GatewayError& e) {
                if (!e.retryable() || attempt >= config_.max_retries) throw;
                retries_.fetch_add(1);
                std::this_thread::sleep_for(delay);
                delay *= 2;
            }
        }
    }

    BackendConfig config_;
    Backend* backend_;
    std::optional<ReplyCache> cache_;
    std::mutex throttle_mutex_;
    std::chrono::steady_clock::time_point next_dispatch_{};
    std::atomic<int> backend_calls_{0};
    std::atomic<int> cache_hits_{0};
    std::atomic<int> retries_{0};
};

}  // namespace facadeage
