#pragma once

#include <algorithm>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include <json.hpp>

#include "facadeage/detail/base64.hpp"
#include "facadeage/detail/hash.hpp"
#include "facadeage/detail/io.hpp"
#include "facadeage/errors.hpp"
#include "facadeage/taxonomy.hpp"

namespace facadeage {

/// One facade image with its ground-truth epoch.
struct CorpusItem {
    int id = 0;
    std::filesystem::path image_path;
    AgeEpoch ground_truth;
    std::string location_hint = "London";
};

enum class MediaType { jpeg, png };

inline std::string_view media_type_name(MediaType t) {
    return t == MediaType::jpeg ? "jpeg" : "png";
}

/// Base64 payload ready for transmission. The digest is computed over the
/// original file bytes, before any resizing, so cache keys stay stable when
/// the resize policy changes.
struct EncodedImage {
    int item_id = 0;
    MediaType media_type = MediaType::jpeg;
    std::string payload;
    std::string source_digest;
    int width = 0;
    int height = 0;
};

struct ManifestOptions {
    bool verify_images = true;             // evaluation-only manifests may skip this
    std::string default_location = "London";
};

inline constexpr int kDefaultMaxDimension = 2048;
inline constexpr int kJpegQuality = 90;

/// Reads a manifest: a JSON array of {"id": int, "image": relative-path,
/// "age": epoch-label} objects, with an optional "location" per entry.
/// Image paths resolve against the manifest's directory. Order is preserved.
inline std::vector<CorpusItem> load_manifest(const std::filesystem::path& path,
                                             const ManifestOptions& options = {}) {
    if (!std::filesystem::exists(path)) throw MissingFileError("manifest not found: " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(detail::read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw MalformedManifestError("manifest " + path.string() + ": " + e.what());
    }
    if (!doc.is_array()) throw MalformedManifestError("manifest " + path.string() + ": expected a JSON array");

    const auto base_dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path{"."};
    std::vector<CorpusItem> items;
    items.reserve(doc.size());
    std::unordered_set<int> seen_ids;
    std::size_t entry_no = 0;
    for (const auto& entry : doc) {
        const std::string locus = "manifest entry " + std::to_string(entry_no++);
        if (!entry.is_object() || !entry.contains("id") || !entry.contains("image") || !entry.contains("age") ||
            !entry["id"].is_number_integer() || !entry["image"].is_string() || !entry["age"].is_string()) {
            throw MalformedManifestError(locus + ": expected {\"id\": int, \"image\": string, \"age\": string}");
        }
        const int id = entry["id"].get<int>();
        if (!seen_ids.insert(id).second) throw DuplicateIdError("duplicate corpus id " + std::to_string(id));

        const auto age_label = entry["age"].get<std::string>();
        const auto match = parse_epoch(age_label);
        const auto* epoch = std::get_if<AgeEpoch>(&match);
        if (!epoch) throw UnknownEpochLabelError(age_label, id);

        CorpusItem item;
        item.id = id;
        item.image_path = base_dir / entry["image"].get<std::string>();
        item.ground_truth = *epoch;
        item.location_hint = entry.value("location", options.default_location);
        if (item.location_hint.empty()) item.location_hint = options.default_location;
        if (options.verify_images && !std::filesystem::exists(item.image_path)) {
            throw MissingFileError("image not found for entry id " + std::to_string(id) + ": " +
                                   item.image_path.string());
        }
        items.push_back(std::move(item));
    }
    return items;
}

namespace detail {

inline std::optional<MediaType> sniff_media_type(std::span<const std::uint8_t> bytes) {
    if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF) return MediaType::jpeg;
    static constexpr std::uint8_t png_magic[] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
    if (bytes.size() >= 8 && std::equal(std::begin(png_magic), std::end(png_magic), bytes.begin())) {
        return MediaType::png;
    }
    return std::nullopt;
}

}  // namespace detail

/// Prepares an image for transmission. When a maximum dimension is given and
/// either side exceeds it, the image is downscaled with preserved aspect
/// ratio (larger side lands exactly on the limit, the other floors, minimum
/// 1 px) and re-encoded as JPEG; otherwise the original bytes go out as-is.
inline EncodedImage encode_image(const CorpusItem& item,
                                 std::optional<int> max_dimension = kDefaultMaxDimension) {
    const auto bytes = detail::read_file_bytes(item.image_path);
    const auto sniffed = detail::sniff_media_type(bytes);
    if (!sniffed) throw UnsupportedFormatError("not a JPEG or PNG file: " + item.image_path.string());

    const cv::Mat raw(1, static_cast<int>(bytes.size()), CV_8UC1, const_cast<std::uint8_t*>(bytes.data()));
    const cv::Mat image = cv::imdecode(raw, cv::IMREAD_COLOR);
    if (image.empty()) throw UndecodableImageError("cannot decode image: " + item.image_path.string());

    EncodedImage out;
    out.item_id = item.id;
    out.source_digest = detail::sha256_hex(std::span{bytes});

    const int larger = std::max(image.cols, image.rows);
    if (max_dimension && larger > *max_dimension) {
        const auto scaled = [&](int side) {
            return std::max(1, static_cast<int>(static_cast<std::int64_t>(side) * *max_dimension / larger));
        };
        const int new_w = scaled(image.cols);
        const int new_h = scaled(image.rows);
        cv::Mat resized;
        cv::resize(image, resized, cv::Size(new_w, new_h), 0, 0, cv::INTER_AREA);
        std::vector<std::uint8_t> jpeg;
        cv::imencode(".jpg", resized, jpeg, {cv::IMWRITE_JPEG_QUALITY, kJpegQuality});
        out.media_type = MediaType::jpeg;
        out.payload = detail::base64_encode(std::span{jpeg});
        out.width = new_w;
        out.height = new_h;
    } else {
        out.media_type = *sniffed;
        out.payload = detail::base64_encode(std::span{bytes});
        out.width = image.cols;
        out.height = image.rows;
    }
    return out;
}

}  // namespace facadeage
