// Exact rational constants for the ordered dense domain.
#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace cdeq {

// All domain constants are exact rationals in reduced canonical form;
// boost::rational keeps the invariant (positive denominator, gcd 1).
using Rational = boost::rational<long long>;

/// Parses "3", "-7", "1/2", "-3/4" or decimals like "0.25".
/// Returns nullopt on malformed input or a zero denominator.
std::optional<Rational> parse_rational(std::string_view text);

/// Canonical text form: integer ("3", "-7") or reduced fraction ("1/2").
std::string to_string(const Rational& r);

struct RationalHash {
    std::size_t operator()(const Rational& r) const {
        std::size_t h = std::hash<long long>{}(r.numerator());
        h ^= std::hash<long long>{}(r.denominator()) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h;
    }
};

} // namespace cdeq
