#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "facadeage/corpus.hpp"
#include "facadeage/errors.hpp"
#include "facadeage/parsing.hpp"
#include "facadeage/taxonomy.hpp"

namespace facadeage {

struct ScoredPair {
    int item_id = 0;
    Prediction prediction;
    AgeEpoch truth;
};

/// Which outcomes enter each metric. The policy is fixed but serialized with
/// every report so the scoring choices stay auditable.
struct ScoringPolicy {
    std::string accuracy = "VALID predictions matching the truth count as correct; every other outcome counts as wrong";
    std::string mae = "VALID uses canonical mid-years; HALLUCINATION uses the mid-year of the claimed range; MALFORMED and REFUSED are excluded and counted";
    std::string confusion = "VALID placed at (truth row, predicted column); other outcomes tallied as excluded, never on the diagonal";
};

struct EvaluationRun {
    std::vector<ScoredPair> pairs;
    ScoringPolicy scored_subset_policy;

    int n() const noexcept { return static_cast<int>(pairs.size()); }
};

/// Pairs predictions with ground truth by item id, in corpus order.
inline EvaluationRun build_run(const std::vector<Prediction>& predictions,
                               const std::vector<CorpusItem>& items) {
    std::map<int, const Prediction*> by_id;
    for (const auto& p : predictions) by_id[p.item_id] = &p;

    std::vector<int> missing;
    EvaluationRun run;
    run.pairs.reserve(items.size());
    std::set<int> claimed;
    for (const auto& item : items) {
        const auto it = by_id.find(item.id);
        if (it == by_id.end()) {
            missing.push_back(item.id);
            continue;
        }
        claimed.insert(item.id);
        run.pairs.push_back({item.id, *it->second, item.ground_truth});
    }
    std::vector<int> extra;
    for (const auto& [id, _] : by_id) {
        if (!claimed.contains(id)) extra.push_back(id);
    }
    if (!missing.empty() || !extra.empty()) {
        std::ostringstream msg;
        msg << "predictions and manifest ids do not align;";
        const auto list = [&](const char* what, const std::vector<int>& ids) {
            if (ids.empty()) return;
            msg << " " << what << ":";
            for (std::size_t i = 0; i < ids.size() && i < 10; ++i) msg << " " << ids[i];
            if (ids.size() > 10) msg << " ... (" << ids.size() << " total)";
        };
        list("missing predictions for", missing);
        list("predictions without manifest entry", extra);
        throw IdMismatchError(msg.str());
    }
    return run;
}

/// Mid-year entering the decade error for one prediction, when scoreable.
inline std::optional<double> predicted_mid_year(const Prediction& p) {
    if (p.outcome == Outcome::valid) return mid_year(*p.epoch);
    if (p.outcome == Outcome::hallucination) return mid_year(*p.claimed_range);
    return std::nullopt;
}

/// 15x15 count grid, rows = ground truth, columns = prediction. For
/// tolerance k, every off-diagonal count within k epoch steps of the truth
/// is folded onto the diagonal of its row. Non-VALID predictions are never
/// placed in the grid; they are tallied as excluded.
struct ConfusionMatrix {
    std::array<std::array<int, kEpochCount>, kEpochCount> counts{};
    int tolerance = 0;
    int excluded = 0;

    int trace() const noexcept {
        int t = 0;
        for (int i = 0; i < kEpochCount; ++i) t += counts[i][i];
        return t;
    }

    int row_sum(int row) const noexcept {
        int s = 0;
        for (int j = 0; j < kEpochCount; ++j) s += counts[row][j];
        return s;
    }

    int total() const noexcept {
        int s = 0;
        for (int i = 0; i < kEpochCount; ++i) s += row_sum(i);
        return s;
    }
};

/// Folds misclassifications within k epoch steps onto the diagonal.
inline ConfusionMatrix fold_confusion(const ConfusionMatrix& standard, int tolerance) {
    ConfusionMatrix folded = standard;
    folded.tolerance = tolerance;
    for (int i = 0; i < kEpochCount; ++i) {
        for (int j = 0; j < kEpochCount; ++j) {
            if (i == j || std::abs(i - j) > tolerance) continue;
            folded.counts[i][i] += folded.counts[i][j];
            folded.counts[i][j] = 0;
        }
    }
    return folded;
}

inline ConfusionMatrix confusion_matrix(const EvaluationRun& run, int tolerance) {
    if (tolerance < 0 || tolerance > 2) throw std::invalid_argument("tolerance must be 0, 1 or 2");
    if (run.n() == 0) throw EmptyRunError{};
    ConfusionMatrix m;
    for (const auto& pair : run.pairs) {
        if (pair.prediction.outcome == Outcome::valid) {
            ++m.counts[pair.truth.index][pair.prediction.epoch->index];
        } else {
            ++m.excluded;
        }
    }
    return tolerance == 0 ? m : fold_confusion(m, tolerance);
}

/// One line of the per-epoch table. Percentages and decades are full
/// precision here; display rounding happens at serialization.
struct EpochReportRow {
    std::string epoch;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double mae = 0.0;       // decades, over scoreable ground-truth instances of this epoch
    int support = 0;        // ground-truth count
    int predicted_count = 0;  // times predicted (VALID only)
    int mae_scored = 0;     // scoreable instances behind the mae value
};

/// Precision/recall/F1 and decade MAE per epoch, rows in chronological
/// order. Zero denominators yield 0 by convention. MAE is grouped by
/// ground-truth epoch; hallucinated pairs contribute through the mid-year of
/// the range they claim.
inline std::vector<EpochReportRow> per_epoch_report(const EvaluationRun& run) {
    if (run.n() == 0) throw EmptyRunError{};
    std::array<int, kEpochCount> tp{}, support{}, predicted{}, scored{};
    std::array<double, kEpochCount> error_sum{};
    for (const auto& pair : run.pairs) {
        const int truth = pair.truth.index;
        ++support[truth];
        if (pair.prediction.outcome == Outcome::valid) {
            const int pred = pair.prediction.epoch->index;
            ++predicted[pred];
            if (pred == truth) ++tp[truth];
        }
        if (const auto mid = predicted_mid_year(pair.prediction)) {
            ++scored[truth];
            error_sum[truth] += std::abs(*mid - mid_year(pair.truth)) / 10.0;
        }
    }
    std::vector<EpochReportRow> rows;
    rows.reserve(kEpochCount);
    for (const auto& epoch : canonical_epochs()) {
        const int c = epoch.index;
        EpochReportRow row;
        row.epoch = epoch.label;
        row.support = support[c];
        row.predicted_count = predicted[c];
        row.mae_scored = scored[c];
        row.precision = predicted[c] == 0 ? 0.0 : 100.0 * tp[c] / predicted[c];
        row.recall = support[c] == 0 ? 0.0 : 100.0 * tp[c] / support[c];
        row.f1 = (row.precision + row.recall) == 0.0
                     ? 0.0
                     : 2.0 * row.precision * row.recall / (row.precision + row.recall);
        row.mae = scored[c] == 0 ? 0.0 : error_sum[c] / scored[c];
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Micro F1, which equals accuracy in this single-label setting: the share
/// of exact matches. Non-VALID outcomes are wrong predictions.
inline double micro_f1(const EvaluationRun& run) {
    if (run.n() == 0) throw EmptyRunError{};
    int exact = 0;
    for (const auto& pair : run.pairs) {
        if (pair.prediction.outcome == Outcome::valid && *pair.prediction.epoch == pair.truth) ++exact;
    }
    return 100.0 * exact / run.n();
}

struct MaeResult {
    double decades = 0.0;
    int scored = 0;    // pairs that entered the mean
    int excluded = 0;  // MALFORMED / REFUSED pairs left out
};

/// Mean absolute mid-year error in decades over scoreable pairs.
inline MaeResult mean_absolute_error(const EvaluationRun& run) {
    if (run.n() == 0) throw EmptyRunError{};
    MaeResult result;
    double sum = 0.0;
    for (const auto& pair : run.pairs) {
        const auto mid = predicted_mid_year(pair.prediction);
        if (!mid) {
            ++result.excluded;
            continue;
        }
        ++result.scored;
        sum += std::abs(*mid - mid_year(pair.truth)) / 10.0;
    }
    if (result.scored == 0) throw NoScoreablePairsError{};
    result.decades = sum / result.scored;
    return result;
}

}  // namespace facadeage
