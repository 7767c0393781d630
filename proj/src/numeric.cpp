#include "qwork/numeric.hpp"

#include "qwork/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

namespace qwork {

namespace {

// Boost reads a leading 0 as an octal prefix; decimal digits only here.
Integer decimal_integer(std::string digits, const std::string& text) {
  bool negative = false;
  if (!digits.empty() && (digits[0] == '+' || digits[0] == '-')) {
    negative = digits[0] == '-';
    digits.erase(0, 1);
  }
  if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    throw ArgumentError("malformed number '" + text + "'");
  }
  const auto first = digits.find_first_not_of('0');
  digits = first == std::string::npos ? "0" : digits.substr(first);
  Integer value(digits);
  return negative ? Integer(-value) : value;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  }
  if (s.empty()) throw ArgumentError("empty number");

  if (auto slash = s.find('/'); slash != std::string::npos) {
    Integer num = decimal_integer(s.substr(0, slash), text);
    Integer den = decimal_integer(s.substr(slash + 1), text);
    if (den == 0) throw ArgumentError("zero denominator in '" + text + "'");
    return Rational(num, den);
  }

  // Decimal with optional exponent, read exactly.
  std::size_t pos = 0;
  bool negative = false;
  if (s[pos] == '+' || s[pos] == '-') negative = s[pos++] == '-';
  std::string digits;
  int scale = 0;
  bool seen_point = false;
  for (; pos < s.size() && s[pos] != 'e' && s[pos] != 'E'; ++pos) {
    char c = s[pos];
    if (c == '.') {
      if (seen_point) throw ArgumentError("malformed number '" + text + "'");
      seen_point = true;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      if (seen_point) --scale;
    } else {
      throw ArgumentError("malformed number '" + text + "'");
    }
  }
  if (digits.empty()) throw ArgumentError("malformed number '" + text + "'");
  if (pos < s.size()) {
    const std::string exp = s.substr(pos + 1);
    std::size_t used = 0;
    int e = 0;
    try {
      e = std::stoi(exp, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != exp.size()) throw ArgumentError("malformed exponent in '" + text + "'");
    scale += e;
  }
  // Far outside what any working precision can hold.
  if (std::abs(scale) > 100000) throw ArgumentError("exponent out of range in '" + text + "'");
  Rational value{decimal_integer(digits, text)};
  Rational ten(10);
  for (int i = 0; i < std::abs(scale); ++i) value = scale > 0 ? value * ten : value / ten;
  return negative ? Rational(-value) : value;
}

std::string format17(double x) {
  if (x == 0.0) return "0";  // folds -0 into 0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace qwork
