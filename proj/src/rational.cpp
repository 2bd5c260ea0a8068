#include "aprob/rational.hpp"

#include <cctype>
#include <cmath>

#include "aprob/errors.hpp"

namespace aprob {
namespace {

using boost::multiprecision::msb;

double log2_of(const BigInt& n) {
  const auto top = msb(n);
  if (top < 1000) return std::log2(n.convert_to<double>());
  const auto shift = top - 60;
  const BigInt head = n >> shift;
  return std::log2(head.convert_to<double>()) + static_cast<double>(shift);
}

BigInt parse_integer(std::string_view text, std::string_view whole) {
  if (text.empty()) throw FormatError("malformed number '" + std::string(whole) + "'");
  for (const char c : text) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw FormatError("malformed number '" + std::string(whole) + "'");
    }
  }
  return BigInt(std::string(text));
}

}  // namespace

std::string to_string(const Rational& value) {
  return boost::multiprecision::numerator(value).str() + "/" + boost::multiprecision::denominator(value).str();
}

Rational parse_rational(std::string_view text) {
  const std::string_view whole = text;
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  Rational result;
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const BigInt den = parse_integer(text.substr(slash + 1), whole);
    if (den == 0) throw FormatError("zero denominator in '" + std::string(whole) + "'");
    result = Rational(parse_integer(text.substr(0, slash), whole), den);
  } else if (const auto dot = text.find('.'); dot != std::string_view::npos) {
    const std::string_view int_part = text.substr(0, dot);
    const std::string_view frac_part = text.substr(dot + 1);
    if (int_part.empty() && frac_part.empty()) throw FormatError("malformed number '" + std::string(whole) + "'");
    const BigInt whole_part = int_part.empty() ? BigInt(0) : parse_integer(int_part, whole);
    const BigInt frac = frac_part.empty() ? BigInt(0) : parse_integer(frac_part, whole);
    BigInt scale = 1;
    for (std::size_t i = 0; i < frac_part.size(); ++i) scale *= 10;
    result = Rational(whole_part) + Rational(frac, scale);
  } else {
    result = Rational(parse_integer(text, whole));
  }
  return negative ? Rational(-result) : result;
}

double to_double(const Rational& value) {
  if (value == 0) return 0.0;
  const BigInt& num = boost::multiprecision::numerator(value);
  const BigInt& den = boost::multiprecision::denominator(value);
  if (msb(abs(num)) < 1000 && msb(den) < 1000) return num.convert_to<double>() / den.convert_to<double>();
  const double magnitude = std::exp2(log2_of(Rational(abs(num), den)));
  return num < 0 ? -magnitude : magnitude;
}

double log2_of(const Rational& value) {
  if (value <= 0) throw DomainError("log2 of a non-positive value");
  return log2_of(boost::multiprecision::numerator(value)) - log2_of(boost::multiprecision::denominator(value));
}

Rational dyadic(std::uint64_t exponent) {
  BigInt den = 1;
  den <<= static_cast<unsigned>(exponent);
  return Rational(BigInt(1), den);
}

std::uint64_t floor_product(const Rational& value, std::uint64_t scale) {
  const BigInt scaled = boost::multiprecision::numerator(value) * scale / boost::multiprecision::denominator(value);
  if (scaled < 0) return 0;
  if (scaled > BigInt(std::numeric_limits<std::uint64_t>::max())) return std::numeric_limits<std::uint64_t>::max();
  return scaled.convert_to<std::uint64_t>();
}

}  // namespace aprob
