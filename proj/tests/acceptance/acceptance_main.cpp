// Acceptance suite: every release gate in one binary, one pass/fail line
// each. Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "facadeage/facadeage.hpp"
#include "support/aggregate.hpp"
#include "support/oracle.hpp"
#include "support/random_runs.hpp"
#include "support/test_util.hpp"

using namespace facadeage;

namespace {

int g_failures = 0;

void criterion(int number, const std::string& name, const std::function<void()>& body) {
    std::string detail;
    bool ok = true;
    try {
        body();
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    std::printf("[%s] criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", number, name.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) ++g_failures;
}

void require(bool condition, const std::string& message) {
    if (!condition) throw std::runtime_error(message);
}

std::vector<EvaluationRun> fixture_pool() {
    static std::vector<EvaluationRun> pool = [] {
        std::vector<EvaluationRun> runs;
        runs.reserve(1000);
        for (unsigned seed = 1; seed <= 1000; ++seed) {
            runs.push_back(testutil::random_run(seed, 200));
        }
        return runs;
    }();
    return pool;
}

int run_cli(const std::string& args) {
    const std::string command = std::string(FACADEAGE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    return std::system(command.c_str());
}

}  // namespace

int main() {
    criterion(1, "micro F1 equals 100*trace/N on 1000 random fixtures in under 5s", [] {
        const auto runs = fixture_pool();
        const auto t0 = std::chrono::steady_clock::now();
        for (const auto& run : runs) {
            const double micro = micro_f1(run);
            const double via_trace = 100.0 * confusion_matrix(run, 0).trace() / run.n();
            require(micro == via_trace, "identity violated pre-rounding");
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        require(seconds < 5.0, "identity sweep took " + std::to_string(seconds) + "s");
    });

    criterion(2, "constructed 131-pair run with 52 exact matches reports accuracy 39.69", [] {
        testutil::TempDir dir;
        const auto files = testutil::materialize_aggregate(dir / "agg");
        require(files.n == 131, "fixture must hold 131 pairs");
        cmd_evaluate(files.predictions, files.manifest, dir / "out");
        const auto json = nlohmann::json::parse(testutil::read_file(dir / "out" / "report.json"));
        require(json["total"]["accuracy_micro_f1"] == 39.69, "report accuracy is not 39.69");
        const auto csv = testutil::read_file(dir / "out" / "report.csv");
        require(csv.find("\nTotal,,,39.69,") != std::string::npos, "csv Total row is not 39.69");
    });

    criterion(3, "MAE matches a brute-force recount within 1e-12, spot checks exact", [] {
        for (const auto& run : fixture_pool()) {
            const auto pairs = testutil::to_oracle_pairs(run);
            const auto expected = oracle::mae_decades(pairs);
            if (expected.scored == 0) continue;
            const auto actual = mean_absolute_error(run);
            require(std::abs(actual.decades - expected.decades) <= 1e-12, "MAE diverges from recount");
            require(actual.scored == expected.scored && actual.excluded == expected.excluded,
                    "scoreable bookkeeping diverges");
            const auto rows = per_epoch_report(run);
            const auto expected_rows = oracle::per_epoch(pairs);
            for (std::size_t c = 0; c < rows.size(); ++c) {
                require(std::abs(rows[c].precision - expected_rows[c].precision) <= 1e-12 &&
                            std::abs(rows[c].recall - expected_rows[c].recall) <= 1e-12 &&
                            std::abs(rows[c].f1 - expected_rows[c].f1) <= 1e-12 &&
                            std::abs(rows[c].mae - expected_rows[c].mae) <= 1e-12,
                        "per-epoch row diverges from recount");
            }
        }

        const auto single = [](const char* truth, const char* predicted) {
            EvaluationRun run;
            Prediction p;
            p.item_id = 1;
            p.outcome = Outcome::valid;
            p.epoch = *find_epoch(predicted);
            run.pairs.push_back({1, p, *find_epoch(truth)});
            return mean_absolute_error(run).decades;
        };
        require(single("1960-1979", "1980-1999") == 2.0, "adjacent 20-year epochs must score 2.0 exactly");
        require(single("<1700", "1840-1859") == 15.0, "open-past spot check must score 15.0 exactly");
    });

    criterion(4, "adjacency folding: diagonals recount, row sums preserved, trace monotone", [] {
        for (const auto& run : fixture_pool()) {
            const auto standard = confusion_matrix(run, 0);
            int previous_trace = standard.trace();
            for (int k : {1, 2}) {
                const auto folded = confusion_matrix(run, k);
                for (int c = 0; c < kEpochCount; ++c) {
                    int expected_diagonal = 0;
                    for (int j = 0; j < kEpochCount; ++j) {
                        if (std::abs(j - c) <= k) expected_diagonal += standard.counts[c][j];
                    }
                    require(folded.counts[c][c] == expected_diagonal, "folded diagonal recount failed");
                    require(folded.row_sum(c) == standard.row_sum(c), "folding altered a row sum");
                }
                require(folded.total() == standard.total(), "folding altered the total count");
                require(folded.trace() >= previous_trace, "trace not monotone in k");
                previous_trace = folded.trace();
            }
            require(previous_trace <= run.n() - standard.excluded, "trace exceeds placeable count");
        }
    });

    criterion(5, "parser: transcripts, 15-label exhaustive suite, wrapped variants", [] {
        FixtureLibrary lib(testutil::asset_dir() / "fixtures");
        const auto parse_text = [](int id, const std::string& text) {
            RawReply reply;
            reply.item_id = id;
            reply.text = text;
            return parse_reply(reply);
        };

        const auto correct = parse_text(55, lib.load("reply_correct").payload);
        require(correct.outcome == Outcome::valid && correct.epoch->label == "1940-1959",
                "correct transcript must parse VALID 1940-1959");
        const auto incorrect = parse_text(26, lib.load("reply_incorrect").payload);
        require(incorrect.outcome == Outcome::valid && incorrect.epoch->label == "<1700",
                "incorrect transcript must parse VALID <1700");
        const auto hallucinated = parse_text(39, lib.load("reply_hallucination").payload);
        require(hallucinated.outcome == Outcome::hallucination &&
                    *hallucinated.claimed_range == ParsedRange{1973, 1997},
                "hallucination transcript must parse to the 1973-1997 range");

        for (const auto& epoch : canonical_epochs()) {
            const auto payload = R"({"age": ")" + epoch.label + R"(", "reason": "r"})";
            const auto plain = parse_text(1, payload);
            require(plain.outcome == Outcome::valid && plain.epoch->index == epoch.index,
                    "canonical label failed the exhaustive suite: " + epoch.label);
            const auto fenced = parse_text(1, "```json\n" + payload + "\n```");
            const auto prosed = parse_text(1, "Assessment follows.\n" + payload);
            require(fenced.outcome == Outcome::valid && fenced.epoch->index == epoch.index &&
                        prosed.outcome == Outcome::valid && prosed.epoch->index == epoch.index,
                    "wrapped variant parsed differently for: " + epoch.label);
        }
    });

    criterion(6, "prompt golden byte identity and newest-first list round trip", [] {
        const auto golden = testutil::read_file(testutil::asset_dir() / "prompt" / "instruction_london.txt");
        require(!golden.empty(), "golden transcription missing");
        require(render_prompt("London") == golden, "rendered prompt differs from the transcription");

        const auto listed = default_prompt_template().epoch_list();
        const auto& epochs = canonical_epochs();
        require(listed.size() == epochs.size(), "embedded list has wrong length");
        for (std::size_t i = 0; i < listed.size(); ++i) {
            require(listed[i] == epochs[epochs.size() - 1 - i].label, "embedded list order mismatch");
        }
    });

    criterion(7, "end-to-end mock run over the sample corpus: fast and byte-identical", [] {
        testutil::TempDir dir;
        const auto manifest = dir / "corpus" / "manifest.json";
        testutil::write_file(manifest,
                             testutil::read_file(testutil::asset_dir() / "sample" / "manifest.json"));
        for (int i = 1; i <= 10; ++i) {
            char name[32];
            std::snprintf(name, sizeof(name), "images/%03d.jpg", i);
            testutil::make_image(dir / "corpus" / name, 96, 64, 40 + i * 15);
        }
        const auto fixture = (testutil::asset_dir() / "sample" / "mock_replies.json").string();

        const auto pass = [&](const std::string& out) {
            const auto t0 = std::chrono::steady_clock::now();
            require(run_cli("classify --manifest " + manifest.string() + " --out " + out +
                            " --backend mock --fixture " + fixture) == 0,
                    "classify exited nonzero");
            require(run_cli("evaluate --predictions " + out + "/predictions.jsonl --manifest " +
                            manifest.string() + " --out " + out) == 0,
                    "evaluate exited nonzero");
            return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        };

        const double first = pass((dir / "run1").string());
        const double second = pass((dir / "run2").string());
        require(first < 2.0 && second < 2.0,
                "run took " + std::to_string(std::max(first, second)) + "s, budget is 2s");

        for (const auto* name : {"predictions.jsonl", "run_meta.json", "report.csv", "report.json",
                                 "confusion_k0.csv", "confusion_k1.csv", "confusion_k2.csv",
                                 "confusion_k0.txt", "confusion_k1.txt", "confusion_k2.txt"}) {
            require(testutil::read_file(dir / "run1" / name) == testutil::read_file(dir / "run2" / name),
                    std::string("output differs across runs: ") + name);
        }
    });

    criterion(8, "unrepresented epoch yields a 0.00/0.00/0.00 row without error", [] {
        EvaluationRun run;
        Prediction p;
        p.item_id = 1;
        p.outcome = Outcome::valid;
        p.epoch = *find_epoch("1920-1939");
        run.pairs.push_back({1, p, *find_epoch("1920-1939")});

        const auto rows = per_epoch_report(run);
        const auto& absent = rows[0];  // "<1700" has no support and no predictions
        require(absent.support == 0 && absent.predicted_count == 0, "row should be unrepresented");
        require(detail::fixed2(absent.precision) == "0.00" && detail::fixed2(absent.recall) == "0.00" &&
                    detail::fixed2(absent.f1) == "0.00",
                "zero-division convention violated");
    });

    criterion(9, "repeated cached mock batch makes zero backend calls", [] {
        testutil::TempDir dir;
        MockScript script;
        for (int i = 1; i <= 10; ++i) {
            script.by_id[i].text = R"({"age": "1920-1939", "reason": ""})";
        }
        MockBackend backend(std::move(script));
        BackendConfig config;
        config.cache_dir = dir / "cache";
        config.retry_initial_delay_ms = 1;
        Gateway gateway(config, backend);

        std::vector<ClassificationRequest> requests;
        for (int i = 1; i <= 10; ++i) {
            ClassificationRequest r;
            r.item_id = i;
            r.instruction_text = "instruction";
            r.image.item_id = i;
            r.image.source_digest = "digest-" + std::to_string(i);
            requests.push_back(std::move(r));
        }

        const auto first = gateway.run_batch(requests);
        require(first.all_ok() && first.backend_calls == 10, "first pass should dispatch every item");
        const auto second = gateway.run_batch(requests);
        require(second.all_ok(), "second pass failed");
        require(second.backend_calls == 0, "second pass dispatched to the backend");
        for (const auto& entry : second.entries) {
            require(entry.reply->from_cache, "second-pass reply not flagged from_cache");
        }
        require(backend.calls() == 10, "backend saw extra calls");
    });

    if (g_failures == 0) {
        std::printf("all acceptance criteria passed\n");
    } else {
        std::printf("%d acceptance criteria FAILED\n", g_failures);
    }
    return g_failures;
}
