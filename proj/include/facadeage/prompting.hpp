#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "facadeage/corpus.hpp"
#include "facadeage/detail/io.hpp"
#include "facadeage/detail/strings.hpp"
#include "facadeage/errors.hpp"
#include "facadeage/generated/prompt_template.hpp"
#include "facadeage/taxonomy.hpp"

namespace facadeage {

inline constexpr std::string_view kLocationSlot = "{{location}}";

/// The instruction text with a location slot. The template is a versioned
/// asset (assets/prompt/instruction.tmpl) embedded at build time; it must
/// contain the canonical epoch list exactly once, newest first, name both
/// output keys and state the no-line-breaks constraint for "reason".
struct PromptTemplate {
    std::string body;

    static constexpr std::array<std::string_view, 2> format_contract{"age", "reason"};

    static PromptTemplate from_string(std::string text);
    static PromptTemplate load(const std::filesystem::path& path) {
        return from_string(detail::read_text_file(path));
    }

    /// The epoch list as embedded in the body, newest first.
    std::vector<std::string> epoch_list() const;
};

namespace detail {

// The list is rendered exactly as the prompt shows it: quoted labels joined
// by ", ", newest first, inside [ ].
inline std::string quoted_epoch_list_newest_first() {
    const auto& epochs = canonical_epochs();
    std::string joined;
    for (auto it = epochs.rbegin(); it != epochs.rend(); ++it) {
        if (!joined.empty()) joined += ", ";
        joined += "\"" + it->label + "\"";
    }
    return joined;
}

}  // namespace detail

inline std::vector<std::string> PromptTemplate::epoch_list() const {
    const auto open = body.find('[');
    const auto close = body.find(']', open);
    std::vector<std::string> labels;
    if (open == std::string::npos || close == std::string::npos) return labels;
    std::string_view inner{body.data() + open + 1, close - open - 1};
    std::size_t pos = 0;
    while ((pos = inner.find('"', pos)) != std::string_view::npos) {
        const auto end = inner.find('"', pos + 1);
        if (end == std::string_view::npos) break;
        labels.emplace_back(inner.substr(pos + 1, end - pos - 1));
        pos = end + 1;
    }
    return labels;
}

inline PromptTemplate PromptTemplate::from_string(std::string text) {
    PromptTemplate t{detail::normalize_lf(text)};
    const auto list = detail::quoted_epoch_list_newest_first();
    const auto first = t.body.find(list);
    if (first == std::string::npos || t.body.find(list, first + 1) != std::string::npos) {
        throw InvalidTemplateError("prompt template must embed the canonical epoch list exactly once, newest first");
    }
    for (auto key : format_contract) {
        if (t.body.find("\"" + std::string(key) + "\"") == std::string::npos) {
            throw InvalidTemplateError("prompt template must name the output key \"" + std::string(key) + "\"");
        }
    }
    if (t.body.find("line breaks") == std::string::npos) {
        throw InvalidTemplateError("prompt template must state the no-line-breaks constraint for \"reason\"");
    }
    return t;
}

inline const PromptTemplate& default_prompt_template() {
    static const PromptTemplate t = PromptTemplate::from_string(generated::kPromptTemplate);
    return t;
}

/// Renders the instruction for a location. With the default template and
/// "London" the output is byte-identical to the checked-in transcription
/// (assets/prompt/instruction_london.txt).
inline std::string render_prompt(const PromptTemplate& t, std::string_view location_hint) {
    if (detail::trim(location_hint).empty()) throw EmptyLocationError{};
    return detail::replace_all(t.body, kLocationSlot, location_hint);
}

inline std::string render_prompt(std::string_view location_hint) {
    return render_prompt(default_prompt_template(), location_hint);
}

/// One unit of work for the gateway: the rendered instruction plus the
/// encoded image it refers to.
struct ClassificationRequest {
    int item_id = 0;
    std::string instruction_text;
    EncodedImage image;
    std::string location_hint;
};

inline ClassificationRequest build_request(const CorpusItem& item, const EncodedImage& image,
                                           const PromptTemplate& t = default_prompt_template()) {
    if (image.item_id != item.id) {
        throw ItemImageMismatchError("image encoded for item " + std::to_string(image.item_id) +
                                     " paired with corpus item " + std::to_string(item.id));
    }
    return {item.id, render_prompt(t, item.location_hint), image, item.location_hint};
}

}  // namespace facadeage
