#include <catch2/catch_amalgamated.hpp>

#include <opencv2/imgcodecs.hpp>

#include "facadeage/corpus.hpp"
#include "facadeage/detail/base64.hpp"
#include "support/test_util.hpp"

using namespace facadeage;

namespace {

std::string manifest_entry(int id, const std::string& image, const std::string& age) {
    return R"({"id": )" + std::to_string(id) + R"(, "image": ")" + image + R"(", "age": ")" + age + R"("})";
}

}  // namespace

TEST_CASE("load_manifest reads entries in order") {
    testutil::TempDir dir;
    testutil::make_image(dir / "a.jpg", 16, 16);
    testutil::make_image(dir / "b.jpg", 16, 16);
    testutil::make_image(dir / "c.jpg", 16, 16);
    testutil::write_file(dir / "manifest.json",
                         "[" + manifest_entry(3, "a.jpg", "1920-1939") + "," +
                             manifest_entry(1, "b.jpg", "<1700") + "," +
                             manifest_entry(2, "c.jpg", ">2020") + "]");

    const auto items = load_manifest(dir / "manifest.json");
    REQUIRE(items.size() == 3);
    CHECK(items[0].id == 3);
    CHECK(items[1].id == 1);
    CHECK(items[2].id == 2);
    CHECK(items[0].ground_truth.label == "1920-1939");
    CHECK(items[0].location_hint == "London");
    CHECK(items[0].image_path == dir / "a.jpg");

    SECTION("deterministic: same file, same sequence") {
        const auto again = load_manifest(dir / "manifest.json");
        REQUIRE(again.size() == items.size());
        for (std::size_t i = 0; i < items.size(); ++i) CHECK(again[i].id == items[i].id);
    }
}

TEST_CASE("load_manifest error paths") {
    testutil::TempDir dir;
    SECTION("missing manifest") {
        CHECK_THROWS_AS(load_manifest(dir / "nope.json"), MissingFileError);
    }
    SECTION("malformed JSON") {
        testutil::write_file(dir / "m.json", "[{\"id\": 1,");
        CHECK_THROWS_AS(load_manifest(dir / "m.json"), MalformedManifestError);
    }
    SECTION("not an array") {
        testutil::write_file(dir / "m.json", "{\"id\": 1}");
        CHECK_THROWS_AS(load_manifest(dir / "m.json"), MalformedManifestError);
    }
    SECTION("entry with missing keys names its position") {
        testutil::write_file(dir / "m.json", "[{\"id\": 1}]");
        try {
            load_manifest(dir / "m.json");
            FAIL("expected MalformedManifestError");
        } catch (const MalformedManifestError& e) {
            CHECK(std::string(e.what()).find("entry 0") != std::string::npos);
        }
    }
    SECTION("non-canonical ground truth") {
        testutil::make_image(dir / "a.jpg", 8, 8);
        testutil::write_file(dir / "m.json", "[" + manifest_entry(7, "a.jpg", "1973-1997") + "]");
        try {
            load_manifest(dir / "m.json");
            FAIL("expected UnknownEpochLabelError");
        } catch (const UnknownEpochLabelError& e) {
            CHECK(e.label() == "1973-1997");
            CHECK(e.entry_id() == 7);
        }
    }
    SECTION("duplicate ids") {
        testutil::make_image(dir / "a.jpg", 8, 8);
        testutil::write_file(dir / "m.json", "[" + manifest_entry(1, "a.jpg", "<1700") + "," +
                                                 manifest_entry(1, "a.jpg", ">2020") + "]");
        CHECK_THROWS_AS(load_manifest(dir / "m.json"), DuplicateIdError);
    }
    SECTION("missing image is an error only when verifying") {
        testutil::write_file(dir / "m.json", "[" + manifest_entry(1, "gone.jpg", "<1700") + "]");
        CHECK_THROWS_AS(load_manifest(dir / "m.json"), MissingFileError);
        CHECK(load_manifest(dir / "m.json", {.verify_images = false}).size() == 1);
    }
    SECTION("empty entry list is a valid, empty corpus") {
        testutil::write_file(dir / "m.json", "[]");
        CHECK(load_manifest(dir / "m.json").empty());
    }
}

TEST_CASE("load_manifest honours per-entry and default locations") {
    testutil::TempDir dir;
    testutil::make_image(dir / "a.jpg", 8, 8);
    testutil::write_file(dir / "m.json",
                         R"([{"id": 1, "image": "a.jpg", "age": "<1700", "location": "Bath"},)"
                         R"({"id": 2, "image": "a.jpg", "age": "<1700"}])");
    const auto items = load_manifest(dir / "m.json", {.verify_images = true, .default_location = "Leeds"});
    CHECK(items[0].location_hint == "Bath");
    CHECK(items[1].location_hint == "Leeds");
}

TEST_CASE("large manifests load whole") {
    testutil::TempDir dir;
    testutil::make_image(dir / "a.jpg", 8, 8);
    std::string doc = "[";
    for (int i = 1; i <= 131; ++i) {
        if (i > 1) doc += ",";
        doc += manifest_entry(i, "a.jpg", "1920-1939");
    }
    doc += "]";
    testutil::write_file(dir / "m.json", doc);
    CHECK(load_manifest(dir / "m.json").size() == 131);
}

TEST_CASE("encode_image identity path keeps original bytes") {
    testutil::TempDir dir;
    testutil::make_image(dir / "a.png", 64, 48);
    CorpusItem item{1, dir / "a.png", *find_epoch("<1700")};

    const auto encoded = encode_image(item, std::nullopt);
    CHECK(encoded.item_id == 1);
    CHECK(encoded.media_type == MediaType::png);
    CHECK(encoded.width == 64);
    CHECK(encoded.height == 48);

    const auto original = detail::read_file_bytes(item.image_path);
    CHECK(detail::base64_decode(encoded.payload) == original);

    SECTION("digest is deterministic") {
        CHECK(encode_image(item, std::nullopt).source_digest == encoded.source_digest);
        CHECK(encoded.source_digest.size() == 64);
    }
    SECTION("no resize when under the limit") {
        const auto capped = encode_image(item, 2048);
        CHECK(capped.width == 64);
        CHECK(capped.media_type == MediaType::png);
    }
    SECTION("jpeg sources keep their media type on the identity path") {
        testutil::make_image(dir / "b.jpg", 32, 32);
        CorpusItem jpeg_item{2, dir / "b.jpg", *find_epoch("<1700")};
        CHECK(encode_image(jpeg_item, std::nullopt).media_type == MediaType::jpeg);
    }
}

TEST_CASE("encode_image downscales past the limit and re-encodes as JPEG") {
    testutil::TempDir dir;
    testutil::make_image(dir / "big.jpg", 300, 200);
    CorpusItem item{2, dir / "big.jpg", *find_epoch("<1700")};

    const auto encoded = encode_image(item, 150);
    CHECK(encoded.media_type == MediaType::jpeg);
    CHECK(encoded.width == 150);
    CHECK(encoded.height == 100);

    SECTION("payload round-trips to the recorded dimensions") {
        const auto bytes = detail::base64_decode(encoded.payload);
        const cv::Mat raw(1, static_cast<int>(bytes.size()), CV_8UC1, const_cast<std::uint8_t*>(bytes.data()));
        const cv::Mat decoded = cv::imdecode(raw, cv::IMREAD_COLOR);
        REQUIRE_FALSE(decoded.empty());
        CHECK(decoded.cols == encoded.width);
        CHECK(decoded.rows == encoded.height);
    }
    SECTION("digest is over the original bytes, stable across resize policies") {
        CHECK(encode_image(item, 150).source_digest == encode_image(item, std::nullopt).source_digest);
    }
    SECTION("derived dimension floors") {
        // 200 * 170 / 300 = 113.33 -> 113
        const auto odd = encode_image(item, 170);
        CHECK(odd.width == 170);
        CHECK(odd.height == 113);
    }
}

TEST_CASE("full-resolution source downscales to the documented shape") {
    testutil::TempDir dir;
    testutil::make_image(dir / "hires.jpg", 6000, 4000);
    CorpusItem item{3, dir / "hires.jpg", *find_epoch("<1700")};
    const auto encoded = encode_image(item);  // default limit 2048
    CHECK(encoded.width == 2048);
    CHECK(encoded.height == 1365);
    CHECK(encoded.media_type == MediaType::jpeg);
}

TEST_CASE("encode_image rejects non-images") {
    testutil::TempDir dir;
    SECTION("unsupported magic") {
        testutil::write_file(dir / "fake.jpg", "plain text, not an image");
        CorpusItem item{1, dir / "fake.jpg", *find_epoch("<1700")};
        CHECK_THROWS_AS(encode_image(item), UnsupportedFormatError);
    }
    SECTION("valid magic, broken stream") {
        std::string bytes = "\xFF\xD8\xFF";
        bytes += "garbage garbage garbage";
        testutil::write_file(dir / "broken.jpg", bytes);
        CorpusItem item{1, dir / "broken.jpg", *find_epoch("<1700")};
        CHECK_THROWS_AS(encode_image(item), UndecodableImageError);
    }
    SECTION("missing file") {
        CorpusItem item{1, dir / "gone.jpg", *find_epoch("<1700")};
        CHECK_THROWS_AS(encode_image(item), MissingFileError);
    }
}
