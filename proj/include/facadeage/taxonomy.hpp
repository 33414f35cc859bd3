#pragma once

#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "facadeage/detail/strings.hpp"

namespace facadeage {

inline constexpr int kEpochCount = 15;

/// One of the fifteen construction-period categories. Closed epochs carry
/// inclusive year bounds ("1800-1819" covers 1800..1819); the open ends are
/// modelled with an unset bound: "<1700" has no start, ">2020" has no end.
struct AgeEpoch {
    std::string label;
    std::optional<int> start_year;
    std::optional<int> end_year;
    int index = 0;  // chronological position, 0 = "<1700" .. 14 = ">2020"

    bool open_past() const noexcept { return !start_year.has_value(); }
    bool open_future() const noexcept { return !end_year.has_value(); }

    friend bool operator==(const AgeEpoch& a, const AgeEpoch& b) noexcept { return a.index == b.index; }
};

/// A well-formed "A-B" year range that is not one of the canonical epochs.
/// This is the shape a hallucinated answer takes (e.g. "1973-1997").
struct ParsedRange {
    int start = 0;
    int end = 0;
    friend bool operator==(const ParsedRange&, const ParsedRange&) = default;
};

struct NoMatch {
    friend bool operator==(const NoMatch&, const NoMatch&) = default;
};

using EpochMatch = std::variant<AgeEpoch, ParsedRange, NoMatch>;

/// Separation of two canonical epochs, both as a count of epoch steps and as
/// the mid-year gap in decades.
struct EpochDistance {
    int index_delta = 0;
    double decade_delta = 0.0;
};

/// The fixed chronology, oldest first. Labels are byte-identical to the list
/// embedded in the instruction prompt (which enumerates them newest first).
inline const std::vector<AgeEpoch>& canonical_epochs() {
    static const std::vector<AgeEpoch> epochs = [] {
        std::vector<AgeEpoch> out;
        out.push_back({"<1700", std::nullopt, 1699, 0});
        out.push_back({"1700-1749", 1700, 1749, 1});
        out.push_back({"1750-1799", 1750, 1799, 2});
        int index = 3;
        for (int start = 1800; start <= 2000; start += 20) {
            const int end = start + 19;
            out.push_back({std::to_string(start) + "-" + std::to_string(end), start, end, index++});
        }
        out.push_back({">2020", 2021, std::nullopt, 14});
        return out;
    }();
    return epochs;
}

inline std::optional<AgeEpoch> find_epoch(std::string_view label) {
    for (const auto& e : canonical_epochs()) {
        if (e.label == label) return e;
    }
    return std::nullopt;
}

namespace detail {

// "A-B" with 1-4 digit years and A <= B; anything else fails.
inline std::optional<ParsedRange> parse_year_range(std::string_view s) {
    const auto dash = s.find('-');
    if (dash == std::string_view::npos || dash == 0 || dash + 1 >= s.size()) return std::nullopt;
    const auto lhs = s.substr(0, dash);
    const auto rhs = s.substr(dash + 1);
    const auto year = [](std::string_view part) -> std::optional<int> {
        if (part.empty() || part.size() > 4) return std::nullopt;
        int value = 0;
        for (char c : part) {
            if (c < '0' || c > '9') return std::nullopt;
            value = value * 10 + (c - '0');
        }
        return value;
    };
    const auto a = year(lhs);
    const auto b = year(rhs);
    if (!a || !b || *a > *b) return std::nullopt;
    return ParsedRange{*a, *b};
}

}  // namespace detail

/// Classifies an arbitrary label: a canonical epoch (after trimming
/// surrounding whitespace, otherwise byte-exact), a well-formed but
/// out-of-list year range, or no match at all. Total: never throws.
inline EpochMatch parse_epoch(std::string_view label) {
    const auto trimmed = detail::trim(label);
    if (auto canonical = find_epoch(trimmed)) return *canonical;
    if (auto range = detail::parse_year_range(trimmed)) return *range;
    return NoMatch{};
}

/// Representative year used by the decade error metric. Closed epochs "A-B"
/// are treated as the half-open interval [A, B+1), giving integer mid-years
/// spaced by exact decades; the open ends are pinned to 1700 and 2020, for
/// predictions and ground truth alike.
inline double mid_year(const AgeEpoch& e) {
    if (e.open_past()) return 1700.0;
    if (e.open_future()) return 2020.0;
    return (*e.start_year + *e.end_year + 1) / 2.0;
}

inline double mid_year(const ParsedRange& r) {
    return (r.start + r.end + 1) / 2.0;
}

inline EpochDistance epoch_distance(const AgeEpoch& a, const AgeEpoch& b) {
    return {std::abs(a.index - b.index), std::abs(mid_year(a) - mid_year(b)) / 10.0};
}

}  // namespace facadeage
