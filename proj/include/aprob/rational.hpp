#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace aprob {

// Exact probabilities. Code lengths are reported as doubles, but every mass,
// Kraft sum and smoothed estimate stays rational until it is printed.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Formats as "num/den" in lowest terms ("3/1" for integers).
std::string to_string(const Rational& value);

/// Accepts "num/den", an integer, or a finite decimal ("0.125").
/// Throws FormatError on anything else.
Rational parse_rational(std::string_view text);

double to_double(const Rational& value);

/// log2 of a positive rational, accurate for values far outside double range.
double log2_of(const Rational& value);

/// 2^-exponent, exactly.
Rational dyadic(std::uint64_t exponent);

/// floor(value * scale) for non-negative values.
std::uint64_t floor_product(const Rational& value, std::uint64_t scale);

}  // namespace aprob
