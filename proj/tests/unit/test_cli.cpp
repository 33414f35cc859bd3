// Exercises the installed binary: exit codes and flag plumbing.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>

#include "facadeage/report.hpp"
#include "support/test_util.hpp"

namespace {

int run_cli(const std::string& args) {
    const std::string command = std::string(FACADEAGE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("exit code 2 on input errors") {
    testutil::TempDir dir;
    SECTION("classify with an unreadable manifest writes nothing") {
        const auto out = (dir / "out").string();
        CHECK(run_cli("classify --manifest " + (dir / "missing.json").string() + " --out " + out +
                      " --backend mock --fixture " +
                      (testutil::asset_dir() / "sample" / "mock_replies.json").string()) == 2);
        CHECK_FALSE(std::filesystem::exists(dir / "out" / "predictions.jsonl"));
    }
    SECTION("evaluate with a missing predictions file") {
        testutil::write_file(dir / "m.json", "[]");
        CHECK(run_cli("evaluate --predictions " + (dir / "nope.jsonl").string() + " --manifest " +
                      (dir / "m.json").string() + " --out " + (dir / "out").string()) == 2);
    }
}

TEST_CASE("exit code 3 on backend failures, with partial results flushed") {
    testutil::TempDir dir;
    testutil::write_file(dir / "corpus" / "manifest.json",
                         R"([{"id": 1, "image": "a.jpg", "age": "<1700"},)"
                         R"({"id": 2, "image": "a.jpg", "age": ">2020"}])");
    testutil::make_image(dir / "corpus" / "a.jpg", 16, 16);
    testutil::write_file(dir / "fixture.json",
                         R"({"replies": {"1": {"text": "{\"age\": \"<1700\"}", "fail_times": 1}},)"
                         R"( "default": {"text": "{\"age\": \">2020\"}"}})");

    CHECK(run_cli("classify --manifest " + (dir / "corpus" / "manifest.json").string() + " --out " +
                  (dir / "out").string() + " --backend mock --fixture " + (dir / "fixture.json").string() +
                  " --retries 0") == 3);
    // the healthy item was still flushed
    const auto flushed = facadeage::read_predictions_jsonl(dir / "out" / "predictions.jsonl");
    REQUIRE(flushed.size() == 1);
    CHECK(flushed[0].item_id == 2);
}

TEST_CASE("exit code 4 on evaluation errors") {
    testutil::TempDir dir;
    testutil::write_file(dir / "m.json", "[]");
    testutil::write_file(dir / "p.jsonl", "");
    CHECK(run_cli("evaluate --predictions " + (dir / "p.jsonl").string() + " --manifest " +
                  (dir / "m.json").string() + " --out " + (dir / "out").string()) == 4);
}

TEST_CASE("make-fixture then evaluate through the binary") {
    testutil::TempDir dir;
    CHECK(run_cli("make-fixture --seed 3 --n 40 --out " + (dir / "fx").string()) == 0);
    CHECK(run_cli("evaluate --predictions " + (dir / "fx" / "predictions.jsonl").string() + " --manifest " +
                  (dir / "fx" / "manifest.json").string() + " --out " + (dir / "fx" / "report").string() +
                  " --tolerance 0 --tolerance 2") == 0);
    CHECK(std::filesystem::exists(dir / "fx" / "report" / "confusion_k0.csv"));
    CHECK(std::filesystem::exists(dir / "fx" / "report" / "confusion_k2.csv"));
    CHECK_FALSE(std::filesystem::exists(dir / "fx" / "report" / "confusion_k1.csv"));
}
