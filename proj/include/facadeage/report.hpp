#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "facadeage/detail/io.hpp"
#include "facadeage/detail/strings.hpp"
#include "facadeage/errors.hpp"
#include "facadeage/metrics.hpp"
#include "facadeage/parsing.hpp"

namespace facadeage {

// -- predictions persistence (JSON Lines) -------------------------------------

inline nlohmann::json prediction_to_json(const Prediction& p) {
    nlohmann::json doc{{"item_id", p.item_id},
                       {"outcome", outcome_name(p.outcome)},
                       {"age", nullptr},
                       {"claimed_range", nullptr},
                       {"reason", p.reason},
                       {"raw_text", p.raw_text}};
    if (p.epoch) doc["age"] = p.epoch->label;
    if (p.claimed_range) doc["claimed_range"] = {p.claimed_range->start, p.claimed_range->end};
    return doc;
}

inline Prediction prediction_from_json(const nlohmann::json& doc) {
    Prediction p;
    if (!doc.is_object() || !doc.contains("item_id") || !doc.contains("outcome")) {
        throw Error("prediction record must carry item_id and outcome");
    }
    p.item_id = doc["item_id"].get<int>();
    const auto outcome = outcome_from_name(doc["outcome"].get<std::string>());
    if (!outcome) throw Error("unknown prediction outcome: " + doc["outcome"].get<std::string>());
    p.outcome = *outcome;
    p.reason = doc.value("reason", "");
    p.raw_text = doc.value("raw_text", "");
    if (p.outcome == Outcome::valid) {
        if (!doc.contains("age") || !doc["age"].is_string()) throw Error("VALID prediction without an age label");
        const auto epoch = find_epoch(doc["age"].get<std::string>());
        if (!epoch) throw Error("VALID prediction carries non-canonical age: " + doc["age"].get<std::string>());
        p.epoch = *epoch;
    } else if (p.outcome == Outcome::hallucination) {
        if (!doc.contains("claimed_range") || !doc["claimed_range"].is_array() ||
            doc["claimed_range"].size() != 2) {
            throw Error("HALLUCINATION prediction without a claimed range");
        }
        p.claimed_range = ParsedRange{doc["claimed_range"][0].get<int>(), doc["claimed_range"][1].get<int>()};
    }
    return p;
}

inline void write_predictions_jsonl(const std::filesystem::path& path,
                                    const std::vector<Prediction>& predictions) {
    std::string out;
    for (const auto& p : predictions) out += prediction_to_json(p).dump() + "\n";
    detail::write_text_file(path, out);
}

inline std::vector<Prediction> read_predictions_jsonl(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw MissingFileError("predictions file not found: " + path.string());
    std::vector<Prediction> predictions;
    std::istringstream in(detail::read_text_file(path));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        try {
            predictions.push_back(prediction_from_json(nlohmann::json::parse(line)));
        } catch (const std::exception& e) {
            throw Error("predictions line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return predictions;
}

// -- report rendering ----------------------------------------------------------

struct ReportTotals {
    double accuracy = 0.0;  // micro F1, identical by construction
    double mae = 0.0;
    bool has_mae = false;  // false when every prediction was malformed or refused
    int n = 0;
    int mae_scored = 0;
    int mae_excluded = 0;
    int valid_predictions = 0;
};

inline ReportTotals compute_totals(const EvaluationRun& run) {
    ReportTotals totals;
    totals.n = run.n();
    totals.accuracy = micro_f1(run);
    try {
        const auto mae = mean_absolute_error(run);
        totals.mae = mae.decades;
        totals.mae_scored = mae.scored;
        totals.mae_excluded = mae.excluded;
        totals.has_mae = true;
    } catch (const NoScoreablePairsError&) {
        totals.mae_excluded = run.n();
    }
    for (const auto& pair : run.pairs) {
        if (pair.prediction.outcome == Outcome::valid) ++totals.valid_predictions;
    }
    return totals;
}

/// Fixed column order: epoch, precision, recall, f1, mae, support,
/// predicted_count; chronological rows then a Total row carrying
/// accuracy/micro-F1 in the f1 column and the overall MAE.
inline std::string render_report_csv(const std::vector<EpochReportRow>& rows, const ReportTotals& totals) {
    std::string out = "epoch,precision,recall,f1,mae,support,predicted_count\n";
    for (const auto& row : rows) {
        out += row.epoch + "," + detail::fixed2(row.precision) + "," + detail::fixed2(row.recall) + "," +
               detail::fixed2(row.f1) + "," + detail::fixed2(row.mae) + "," + std::to_string(row.support) +
               "," + std::to_string(row.predicted_count) + "\n";
    }
    out += "Total,,," + detail::fixed2(totals.accuracy) + "," +
           (totals.has_mae ? detail::fixed2(totals.mae) : std::string{}) + "," + std::to_string(totals.n) +
           "," + std::to_string(totals.valid_predictions) + "\n";
    return out;
}

inline nlohmann::json render_report_json(const std::vector<EpochReportRow>& rows, const ReportTotals& totals,
                                         const ScoringPolicy& policy) {
    nlohmann::json epochs = nlohmann::json::array();
    for (const auto& row : rows) {
        epochs.push_back({{"epoch", row.epoch},
                          {"precision", detail::round2(row.precision)},
                          {"recall", detail::round2(row.recall)},
                          {"f1", detail::round2(row.f1)},
                          {"mae", detail::round2(row.mae)},
                          {"support", row.support},
                          {"predicted_count", row.predicted_count}});
    }
    return nlohmann::json{{"epochs", epochs},
                          {"total",
                           {{"accuracy_micro_f1", detail::round2(totals.accuracy)},
                            {"mae", totals.has_mae ? nlohmann::json(detail::round2(totals.mae))
                                                   : nlohmann::json(nullptr)},
                            {"n", totals.n},
                            {"mae_scored", totals.mae_scored},
                            {"mae_excluded", totals.mae_excluded},
                            {"valid_predictions", totals.valid_predictions}}},
                          {"policy",
                           {{"accuracy", policy.accuracy},
                            {"mae", policy.mae},
                            {"confusion", policy.confusion}}}};
}

/// CSV grid: header row of predicted labels, one row per ground-truth label.
inline std::string render_confusion_csv(const ConfusionMatrix& m) {
    const auto& epochs = canonical_epochs();
    std::string out = "truth\\predicted";
    for (const auto& e : epochs) out += "," + e.label;
    out += "\n";
    for (int i = 0; i < kEpochCount; ++i) {
        out += epochs[i].label;
        for (int j = 0; j < kEpochCount; ++j) out += "," + std::to_string(m.counts[i][j]);
        out += "\n";
    }
    return out;
}

/// Plain-text grid with aligned cells, rows = ground truth.
inline std::string render_confusion_text(const ConfusionMatrix& m) {
    const auto& epochs = canonical_epochs();
    std::size_t label_width = 0;
    for (const auto& e : epochs) label_width = std::max(label_width, e.label.size());
    int max_count = 0;
    for (int i = 0; i < kEpochCount; ++i)
        for (int j = 0; j < kEpochCount; ++j) max_count = std::max(max_count, m.counts[i][j]);
    const int cell = std::max<int>(4, static_cast<int>(std::to_string(max_count).size()) + 2);

    std::ostringstream out;
    out << "confusion matrix, tolerance k=" << m.tolerance << " (rows = ground truth, columns = predicted)\n";
    out << std::string(label_width, ' ');
    for (int j = 0; j < kEpochCount; ++j) out << std::setw(cell) << ("c" + std::to_string(j));
    out << "\n";
    for (int i = 0; i < kEpochCount; ++i) {
        out << std::left << std::setw(static_cast<int>(label_width)) << epochs[i].label << std::right;
        for (int j = 0; j < kEpochCount; ++j) out << std::setw(cell) << m.counts[i][j];
        out << "\n";
    }
    out << "columns: ";
    for (int j = 0; j < kEpochCount; ++j) out << (j ? ", " : "") << "c" << j << "=" << epochs[j].label;
    out << "\nexcluded (non-VALID predictions): " << m.excluded << "\n";
    return out.str();
}

}  // namespace facadeage
