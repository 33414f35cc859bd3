// Command-line entry point: classify a corpus through a vision-language
// backend, evaluate a predictions file, or generate synthetic fixtures.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "facadeage/facadeage.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 2;
constexpr int kExitBackendError = 3;
constexpr int kExitEvaluationError = 4;

int classify_command(const facadeage::RunConfig& config) {
    const auto outcome = facadeage::cmd_classify(config);
    std::printf("classified %d items: %d valid, %d hallucination, %d malformed, %d refused\n",
                outcome.items, outcome.summary.valid, outcome.summary.hallucination,
                outcome.summary.malformed, outcome.summary.refused);
    std::printf("backend calls %d, cache hits %d, new cost %.6f, total latency %.3fs\n",
                outcome.backend_calls, outcome.cache_hits, outcome.total_cost,
                outcome.total_latency_seconds);
    if (!outcome.failures.empty()) {
        for (const auto& f : outcome.failures) {
            std::fprintf(stderr, "item %d failed: %s\n", f.item_id, f.error.c_str());
        }
        return kExitBackendError;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Zero-shot building age epoch classification harness"};
    app.require_subcommand(1);

    facadeage::RunConfig config;
    std::string backend_name = "mock";
    std::string fixture_path;
    std::string cache_dir;
    std::string prompt_path;
    int max_dimension = facadeage::kDefaultMaxDimension;
    bool no_resize = false;
    double temperature = 0.0;
    bool temperature_set = false;

    auto* classify = app.add_subcommand("classify", "Run the corpus through a backend and write predictions");
    classify->add_option("--manifest", config.manifest_path, "Corpus manifest (JSON array)")->required();
    classify->add_option("--out", config.output_dir, "Output directory")->required();
    classify->add_option("--backend", backend_name, "Backend: live or mock")
        ->check(CLI::IsMember({"live", "mock"}))
        ->required();
    classify->add_option("--fixture", fixture_path, "Mock backend reply fixture (JSON)");
    classify->add_option("--endpoint", config.backend_config.endpoint_url, "Chat-completions endpoint URL");
    classify->add_option("--model", config.backend_config.model_name, "Model name");
    classify->add_option("--api-key-env", config.backend_config.api_key_env,
                         "Environment variable holding the API key (never a flag)");
    classify->add_option("--temperature", temperature, "Sampling temperature (default 0)")
        ->each([&](const std::string&) { temperature_set = true; });
    classify->add_option("--max-output-tokens", config.backend_config.max_output_tokens, "Reply token cap");
    classify->add_option("--timeout", config.backend_config.request_timeout_seconds, "Request timeout, seconds");
    classify->add_option("--retries", config.backend_config.max_retries, "Retry budget for transient failures");
    classify->add_option("--concurrency", config.backend_config.max_concurrency, "Max requests in flight");
    classify->add_option("--interval-ms", config.backend_config.min_request_interval_ms,
                         "Minimum milliseconds between dispatches");
    classify->add_option("--price-in", config.backend_config.price_per_million_input_tokens,
                         "Cost per million input tokens");
    classify->add_option("--price-out", config.backend_config.price_per_million_output_tokens,
                         "Cost per million output tokens");
    classify->add_option("--cache", cache_dir, "Reply cache directory (enables caching)");
    classify->add_option("--max-dimension", max_dimension, "Downscale images so no side exceeds this")
        ->check(CLI::PositiveNumber);
    classify->add_flag("--no-resize", no_resize, "Send images at source resolution");
    classify->add_option("--location", config.location_hint, "Location hint substituted into the prompt");
    classify->add_option("--prompt-template", prompt_path, "Override the built-in instruction template");

    std::string predictions_path;
    std::string eval_manifest;
    std::string eval_out;
    std::vector<int> tolerances{0, 1, 2};
    auto* evaluate = app.add_subcommand("evaluate", "Score a predictions file against a manifest");
    evaluate->add_option("--predictions", predictions_path, "predictions.jsonl")->required();
    evaluate->add_option("--manifest", eval_manifest, "Corpus manifest with ground truth")->required();
    evaluate->add_option("--out", eval_out, "Output directory")->required();
    evaluate->add_option("--tolerance", tolerances, "Confusion tolerances to render (subset of 0 1 2)")
        ->check(CLI::Range(0, 2));

    unsigned seed = 0;
    int fixture_n = 131;
    std::string fixture_out;
    auto* make_fixture = app.add_subcommand("make-fixture", "Generate a synthetic manifest + predictions pair");
    make_fixture->add_option("--seed", seed, "RNG seed")->required();
    make_fixture->add_option("--n", fixture_n, "Number of items")->check(CLI::PositiveNumber);
    make_fixture->add_option("--out", fixture_out, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (classify->parsed()) {
            config.backend = backend_name == "live" ? facadeage::BackendKind::live : facadeage::BackendKind::mock;
            if (!fixture_path.empty()) config.mock_fixture = fixture_path;
            if (!cache_dir.empty()) config.backend_config.cache_dir = cache_dir;
            if (!prompt_path.empty()) config.prompt_template_path = prompt_path;
            if (temperature_set) config.backend_config.temperature = temperature;
            config.max_dimension = no_resize ? std::nullopt : std::optional<int>(max_dimension);
            return classify_command(config);
        }
        if (evaluate->parsed()) {
            facadeage::cmd_evaluate(predictions_path, eval_manifest, eval_out, tolerances);
            std::printf("report bundle written to %s\n", eval_out.c_str());
            return kExitOk;
        }
        if (make_fixture->parsed()) {
            facadeage::cmd_make_fixture(seed, fixture_n, fixture_out);
            std::printf("fixture written to %s\n", fixture_out.c_str());
            return kExitOk;
        }
    } catch (const facadeage::GatewayError& e) {
        std::fprintf(stderr, "backend error: %s\n", e.what());
        return kExitBackendError;
    } catch (const facadeage::EmptyRunError& e) {
        std::fprintf(stderr, "evaluation error: %s\n", e.what());
        return kExitEvaluationError;
    } catch (const facadeage::NoScoreablePairsError& e) {
        std::fprintf(stderr, "evaluation error: %s\n", e.what());
        return kExitEvaluationError;
    } catch (const facadeage::IdMismatchError& e) {
        std::fprintf(stderr, "evaluation error: %s\n", e.what());
        return kExitEvaluationError;
    } catch (const facadeage::Error& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return kExitInputError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInputError;
    }
    return kExitOk;
}
