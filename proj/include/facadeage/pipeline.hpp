#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "facadeage/corpus.hpp"
#include "facadeage/detail/hash.hpp"
#include "facadeage/detail/io.hpp"
#include "facadeage/errors.hpp"
#include "facadeage/gateway.hpp"
#include "facadeage/http_backend.hpp"
#include "facadeage/metrics.hpp"
#include "facadeage/mock_backend.hpp"
#include "facadeage/parsing.hpp"
#include "facadeage/prompting.hpp"
#include "facadeage/report.hpp"

namespace facadeage {

enum class BackendKind { live, mock };

struct RunConfig {
    std::filesystem::path manifest_path;
    std::filesystem::path output_dir;
    BackendKind backend = BackendKind::mock;
    BackendConfig backend_config;
    std::optional<std::filesystem::path> mock_fixture;
    std::optional<int> max_dimension = kDefaultMaxDimension;
    std::vector<int> tolerances{0, 1, 2};
    std::string location_hint = "London";
    std::optional<std::filesystem::path> prompt_template_path;
};

struct ClassifyOutcome {
    int items = 0;
    ParseSummary summary;
    std::vector<BatchFailure> failures;
    double total_cost = 0.0;
    double total_latency_seconds = 0.0;
    int cache_hits = 0;
    int backend_calls = 0;
};

/// Full classification pass: manifest -> prompt+image requests -> gateway ->
/// parsed predictions. Writes predictions.jsonl (one line per item, input
/// order) and run_meta.json into the output directory. On per-item gateway
/// failures the successful predictions are still flushed and the failures
/// are reported both in run_meta.json and in the returned outcome.
inline ClassifyOutcome cmd_classify(const RunConfig& config) {
    const auto items = load_manifest(config.manifest_path, {.verify_images = true,
                                                            .default_location = config.location_hint});

    const PromptTemplate prompt_template = config.prompt_template_path
                                               ? PromptTemplate::load(*config.prompt_template_path)
                                               : default_prompt_template();

    std::unique_ptr<Backend> backend;
    if (config.backend == BackendKind::mock) {
        if (!config.mock_fixture) throw Error("mock backend requires a fixture file");
        backend = std::make_unique<MockBackend>(MockBackend::script_from_file(*config.mock_fixture));
    } else {
        backend = std::make_unique<HttpBackend>(config.backend_config);
    }

    std::vector<ClassificationRequest> requests;
    requests.reserve(items.size());
    for (const auto& item : items) {
        requests.push_back(build_request(item, encode_image(item, config.max_dimension), prompt_template));
    }

    ClassifyOutcome outcome;
    outcome.items = static_cast<int>(items.size());
    std::vector<Prediction> predictions;
    if (!requests.empty()) {
        Gateway gateway(config.backend_config, *backend);
        const auto batch = gateway.run_batch(requests);
        std::vector<RawReply> replies;
        replies.reserve(batch.entries.size());
        for (const auto& entry : batch.entries) {
            if (entry.reply) {
                replies.push_back(*entry.reply);
            } else {
                outcome.failures.push_back(*entry.failure);
            }
        }
        auto [parsed, summary] = classify_batch(replies);
        predictions = std::move(parsed);
        outcome.summary = summary;
        outcome.total_cost = batch.total_new_cost;
        outcome.total_latency_seconds = batch.total_latency_seconds;
        outcome.cache_hits = batch.cache_hits;
        outcome.backend_calls = batch.backend_calls;
    }

    write_predictions_jsonl(config.output_dir / "predictions.jsonl", predictions);

    nlohmann::json failures = nlohmann::json::array();
    for (const auto& f : outcome.failures) failures.push_back({{"item_id", f.item_id}, {"error", f.error}});
    const nlohmann::json meta{
        {"backend", config.backend == BackendKind::mock ? "mock" : "live"},
        {"model", config.backend_config.model_name},
        {"prompt_sha256", detail::sha256_hex(render_prompt(prompt_template, config.location_hint))},
        {"items", outcome.items},
        {"outcomes",
         {{"VALID", outcome.summary.valid},
          {"HALLUCINATION", outcome.summary.hallucination},
          {"MALFORMED", outcome.summary.malformed},
          {"REFUSED", outcome.summary.refused}}},
        {"total_cost", outcome.total_cost},
        {"total_latency_seconds", outcome.total_latency_seconds},
        {"cache_hits", outcome.cache_hits},
        {"backend_calls", outcome.backend_calls},
        {"failures", failures}};
    detail::write_text_file(config.output_dir / "run_meta.json", meta.dump(2) + "\n");
    return outcome;
}

/// Scores a predictions file against a manifest and writes the report
/// bundle: report.csv / report.json plus confusion_k<k>.csv and .txt for
/// each requested tolerance.
inline void cmd_evaluate(const std::filesystem::path& predictions_path,
                         const std::filesystem::path& manifest_path,
                         const std::filesystem::path& output_dir,
                         const std::vector<int>& tolerances = {0, 1, 2}) {
    const auto predictions = read_predictions_jsonl(predictions_path);
    const auto items = load_manifest(manifest_path, {.verify_images = false});
    const auto run = build_run(predictions, items);
    if (run.n() == 0) throw EmptyRunError{};

    const auto rows = per_epoch_report(run);
    const auto totals = compute_totals(run);
    detail::write_text_file(output_dir / "report.csv", render_report_csv(rows, totals));
    detail::write_text_file(output_dir / "report.json",
                            render_report_json(rows, totals, run.scored_subset_policy).dump(2) + "\n");
    for (int k : tolerances) {
        const auto matrix = confusion_matrix(run, k);
        const auto stem = "confusion_k" + std::to_string(k);
        detail::write_text_file(output_dir / (stem + ".csv"), render_confusion_csv(matrix));
        detail::write_text_file(output_dir / (stem + ".txt"), render_confusion_text(matrix));
    }
}

struct SyntheticRun {
    std::vector<CorpusItem> items;
    std::vector<Prediction> predictions;
};

/// Deterministic synthetic corpus + predictions for metric testing. Ground
/// truth is uniform over the 15 epochs; the predicted index is offset from
/// the truth by a geometrically distributed number of steps (p = 1/2, so
/// offset d has probability 2^-(d+1)), random direction, clamped to the
/// valid range. Draws come straight from mt19937 so files are identical
/// across platforms for the same seed.
inline SyntheticRun make_synthetic_run(unsigned seed, int n) {
    if (n < 1) throw std::invalid_argument("fixture size must be >= 1");
    std::mt19937 rng(seed);
    const auto& epochs = canonical_epochs();
    SyntheticRun run;
    run.items.reserve(static_cast<std::size_t>(n));
    run.predictions.reserve(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) {
        const int truth = static_cast<int>(rng() % kEpochCount);
        int offset = 0;
        while (rng() & 1u) ++offset;
        const bool backwards = (rng() & 1u) != 0;
        const int predicted = std::clamp(truth + (backwards ? -offset : offset), 0, kEpochCount - 1);

        CorpusItem item;
        item.id = i;
        char name[32];
        std::snprintf(name, sizeof(name), "images/%03d.jpg", i);
        item.image_path = name;
        item.ground_truth = epochs[static_cast<std::size_t>(truth)];
        run.items.push_back(std::move(item));

        Prediction p;
        p.item_id = i;
        p.outcome = Outcome::valid;
        p.epoch = epochs[static_cast<std::size_t>(predicted)];
        p.raw_text = R"({"age": ")" + epochs[static_cast<std::size_t>(predicted)].label + R"(", "reason": ""})";
        run.predictions.push_back(std::move(p));
    }
    return run;
}

/// Writes the synthetic pair as manifest.json + predictions.jsonl.
inline void cmd_make_fixture(unsigned seed, int n, const std::filesystem::path& output_dir) {
    const auto run = make_synthetic_run(seed, n);
    nlohmann::json manifest = nlohmann::json::array();
    for (const auto& item : run.items) {
        manifest.push_back({{"id", item.id},
                            {"image", item.image_path.generic_string()},
                            {"age", item.ground_truth.label}});
    }
    detail::write_text_file(output_dir / "manifest.json", manifest.dump(2) + "\n");
    write_predictions_jsonl(output_dir / "predictions.jsonl", run.predictions);
}

}  // namespace facadeage
