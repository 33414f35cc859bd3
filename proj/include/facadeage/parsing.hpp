#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "facadeage/gateway.hpp"
#include "facadeage/taxonomy.hpp"

namespace facadeage {

enum class Outcome { valid, hallucination, malformed, refused };

inline std::string_view outcome_name(Outcome o) {
    switch (o) {
        case Outcome::valid: return "VALID";
        case Outcome::hallucination: return "HALLUCINATION";
        case Outcome::malformed: return "MALFORMED";
        case Outcome::refused: return "REFUSED";
    }
    return "MALFORMED";
}

inline std::optional<Outcome> outcome_from_name(std::string_view name) {
    if (name == "VALID") return Outcome::valid;
    if (name == "HALLUCINATION") return Outcome::hallucination;
    if (name == "MALFORMED") return Outcome::malformed;
    if (name == "REFUSED") return Outcome::refused;
    return std::nullopt;
}

/// A validated model output. VALID carries the canonical epoch;
/// HALLUCINATION carries the well-formed but out-of-list range the model
/// invented. The verbatim reply is always preserved for audit.
struct Prediction {
    int item_id = 0;
    Outcome outcome = Outcome::malformed;
    std::optional<AgeEpoch> epoch;
    std::optional<ParsedRange> claimed_range;
    std::string reason;
    std::string raw_text;
};

namespace detail {

// Copies the balanced {...} region starting at `start` while stripping
// unquoted #-comments and trailing commas, so Python-flavoured listing noise
// still parses strictly. Returns nothing when the braces never balance.
inline std::optional<std::string> sanitized_object_at(std::string_view text, std::size_t start) {
    std::string out;
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
            out.push_back(c);
            if (escaped) {
                escaped = false;
            } else if (c == '\\') {
                escaped = true;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '#') {
            while (i + 1 < text.size() && text[i + 1] != '\n') ++i;
            continue;
        }
        if (c == '"') {
            in_string = true;
            out.push_back(c);
            continue;
        }
        if (c == '}' || c == ']') {
            const auto last = out.find_last_not_of(" \t\r\n");
            if (last != std::string::npos && out[last] == ',') out.erase(last, 1);
        }
        out.push_back(c);
        if (c == '{') {
            ++depth;
        } else if (c == '}') {
            if (--depth == 0) return out;
        }
    }
    return std::nullopt;
}

}  // namespace detail

/// Finds the first substring that parses as a strict JSON object, tolerating
/// surrounding prose, code fences, comment noise and trailing commas.
inline std::optional<nlohmann::json> extract_first_json_object(std::string_view text) {
    for (auto pos = text.find('{'); pos != std::string_view::npos; pos = text.find('{', pos + 1)) {
        const auto candidate = detail::sanitized_object_at(text, pos);
        if (!candidate) continue;
        auto parsed = nlohmann::json::parse(*candidate, nullptr, /*allow_exceptions=*/false);
        if (!parsed.is_discarded() && parsed.is_object()) return parsed;
    }
    return std::nullopt;
}

/// Total classification of one reply: VALID when "age" is canonical,
/// HALLUCINATION when it is a well-formed range outside the list, MALFORMED
/// when no usable payload exists, REFUSED when the backend filtered the
/// reply. Never throws.
inline Prediction parse_reply(const RawReply& reply) {
    Prediction p;
    p.item_id = reply.item_id;
    p.raw_text = reply.text;
    if (reply.refused) {
        p.outcome = Outcome::refused;
        return p;
    }
    const auto object = extract_first_json_object(reply.text);
    if (!object) {
        p.outcome = Outcome::malformed;
        return p;
    }
    if (object->contains("reason") && (*object)["reason"].is_string()) {
        p.reason = (*object)["reason"].get<std::string>();
    }
    if (!object->contains("age") || !(*object)["age"].is_string()) {
        p.outcome = Outcome::malformed;
        return p;
    }
    const auto match = parse_epoch((*object)["age"].get<std::string>());
    if (const auto* canonical = std::get_if<AgeEpoch>(&match)) {
        p.outcome = Outcome::valid;
        p.epoch = *canonical;
    } else if (const auto* range = std::get_if<ParsedRange>(&match)) {
        p.outcome = Outcome::hallucination;
        p.claimed_range = *range;
    } else {
        p.outcome = Outcome::malformed;
    }
    return p;
}

struct ParseSummary {
    int valid = 0;
    int hallucination = 0;
    int malformed = 0;
    int refused = 0;

    int total() const noexcept { return valid + hallucination + malformed + refused; }

    void count(Outcome o) {
        switch (o) {
            case Outcome::valid: ++valid; break;
            case Outcome::hallucination: ++hallucination; break;
            case Outcome::malformed: ++malformed; break;
            case Outcome::refused: ++refused; break;
        }
    }
};

inline std::pair<std::vector<Prediction>, ParseSummary> classify_batch(const std::vector<RawReply>& replies) {
    std::vector<Prediction> predictions;
    predictions.reserve(replies.size());
    ParseSummary summary;
    for (const auto& reply : replies) {
        predictions.push_back(parse_reply(reply));
        summary.count(predictions.back().outcome);
    }
    return {std::move(predictions), summary};
}

}  // namespace facadeage
