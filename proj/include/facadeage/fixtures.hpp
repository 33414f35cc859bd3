#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>

#include "facadeage/detail/io.hpp"
#include "facadeage/errors.hpp"

namespace facadeage {

/// A curated test asset with a provenance note. The reply transcripts are
/// stored raw, quirks included (inline # annotations, trailing commas);
/// the parser's tolerance is what makes them consumable.
struct Fixture {
    std::string name;
    std::string payload;
    std::string anchor;
};

class FixtureLibrary {
public:
    struct Registration {
        std::string_view name;
        std::string_view file;
        std::string_view anchor;
    };

    static constexpr std::array<Registration, 4> kRegistry{{
        {"reply_correct", "reply_correct.txt",
         "verbatim reply transcript, item 55: correct prediction 1940-1959"},
        {"reply_incorrect", "reply_incorrect.txt",
         "verbatim reply transcript, item 26: in-list but wrong prediction <1700 (truth 1840-1859)"},
        {"reply_hallucination", "reply_hallucination.txt",
         "verbatim reply transcript, item 39: fabricated out-of-list range 1973-1997 (truth 1960-1979)"},
        {"aggregate_pairs", "aggregate_pairs.json",
         "131 truth/prediction pairs with 52 exact matches and one hallucinated range"},
    }};

    explicit FixtureLibrary(std::filesystem::path dir) : dir_(std::move(dir)) {}

    Fixture load(std::string_view name) const {
        for (const auto& reg : kRegistry) {
            if (reg.name == name) {
                return {std::string(reg.name), detail::read_text_file(dir_ / reg.file), std::string(reg.anchor)};
            }
        }
        throw UnknownFixtureError("no fixture registered under \"" + std::string(name) + "\"");
    }

private:
    std::filesystem::path dir_;
};

}  // namespace facadeage
