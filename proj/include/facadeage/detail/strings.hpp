#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>

namespace facadeage::detail {

inline std::string_view trim(std::string_view s) {
    const auto is_ws = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
    while (!s.empty() && is_ws(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_ws(s.back())) s.remove_suffix(1);
    return s;
}

// CRLF/CR -> LF. Keeps golden-file comparisons platform independent.
inline std::string normalize_lf(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\r') {
            if (i + 1 < s.size() && s[i + 1] == '\n') continue;
            out.push_back('\n');
        } else {
            out.push_back(s[i]);
        }
    }
    return out;
}

inline std::string replace_all(std::string text, std::string_view from, std::string_view to) {
    std::size_t pos = 0;
    while ((pos = text.find(from, pos)) != std::string::npos) {
        text.replace(pos, from.size(), to);
        pos += to.size();
    }
    return text;
}

// Display rounding: half away from zero, two decimals. Internal values stay
// full precision; this is applied only at serialization boundaries.
inline double round2(double x) {
    return std::round(x * 100.0) / 100.0;
}

inline std::string fixed2(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", round2(x));
    // avoid "-0.00"
    std::string s{buf};
    return s == "-0.00" ? "0.00" : s;
}

}  // namespace facadeage::detail
