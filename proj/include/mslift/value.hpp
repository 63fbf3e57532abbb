#ifndef MSLIFT_VALUE_HPP
#define MSLIFT_VALUE_HPP

#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>
#include <variant>

#include "mslift/errors.hpp"

namespace mslift {

/// A concrete property value: a real number or a symbol.
/// Ordered by alternative first (reals before symbols), then by value.
using Value = std::variant<double, std::string>;

inline bool is_real(const Value& v) { return std::holds_alternative<double>(v); }

inline double as_real(const Value& v) {
    if (const auto* x = std::get_if<double>(&v)) return *x;
    throw InvalidInput("expected a real value, got symbol '" + std::get<std::string>(v) + "'");
}

/// Shortest round-trip representation of a double.
inline std::string format_real(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

/// Real rounded to 12 significant digits; used where reals compare with tolerance.
inline std::string format_real_tolerant(double x) {
    if (x == 0.0) return "0";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.11e", x);
    return buf;
}

inline std::string to_string(const Value& v) {
    if (const auto* x = std::get_if<double>(&v)) return format_real(*x);
    return std::get<std::string>(v);
}

} // namespace mslift

#endif
