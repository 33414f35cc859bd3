#pragma once

// Materializes the aggregate pairs fixture as a manifest + predictions pair
// ready for cmd_evaluate. Predictions are produced by running synthesized
// reply texts through the real parser, so the hallucinated range takes the
// same path a live reply would.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "facadeage/fixtures.hpp"
#include "facadeage/parsing.hpp"
#include "facadeage/report.hpp"
#include "support/test_util.hpp"

namespace testutil {

struct AggregateRun {
    std::filesystem::path manifest;
    std::filesystem::path predictions;
    int n = 0;
};

inline AggregateRun materialize_aggregate(const std::filesystem::path& dir) {
    const auto payload =
        facadeage::FixtureLibrary(asset_dir() / "fixtures").load("aggregate_pairs").payload;
    const auto doc = nlohmann::json::parse(payload);

    nlohmann::json manifest = nlohmann::json::array();
    std::vector<facadeage::Prediction> predictions;
    for (const auto& entry : doc) {
        const int id = entry["id"].get<int>();
        manifest.push_back({{"id", id},
                            {"image", "images/" + std::to_string(id) + ".jpg"},
                            {"age", entry["truth"].get<std::string>()}});
        facadeage::RawReply reply;
        reply.item_id = id;
        reply.text = R"({"age": ")" + entry["predicted"].get<std::string>() + R"(", "reason": ""})";
        predictions.push_back(facadeage::parse_reply(reply));
    }

    AggregateRun out;
    out.n = static_cast<int>(predictions.size());
    out.manifest = dir / "manifest.json";
    out.predictions = dir / "predictions.jsonl";
    std::filesystem::create_directories(dir);
    write_file(out.manifest, manifest.dump(1) + "\n");
    facadeage::write_predictions_jsonl(out.predictions, predictions);
    return out;
}

}  // namespace testutil
