#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace gpsampling {

/// Shortest round-trip decimal form of v; stable across runs.
inline std::string format_number(double v) {
    if (v == 0.0) return "0";  // folds -0
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return {buf, res.ptr};
}

}  // namespace gpsampling
