#pragma once

#include <charconv>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>

namespace ratchet::csv {

/// Shortest decimal that parses back to exactly `v`.
[[nodiscard]] inline std::string format(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

inline void header(std::ostream& out, std::initializer_list<std::string_view> columns) {
    bool first = true;
    for (auto c : columns) {
        if (!first) out << ',';
        out << c;
        first = false;
    }
    out << '\n';
}

/// Writes one row of doubles.
inline void row(std::ostream& out, std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
        if (!first) out << ',';
        out << format(v);
        first = false;
    }
    out << '\n';
}

}  // namespace ratchet::csv
