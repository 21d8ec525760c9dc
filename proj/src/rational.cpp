#include "ewl/rational.hpp"

#include <cctype>
#include <cmath>

#include "ewl/error.hpp"

namespace ewl {
namespace {

using boost::multiprecision::cpp_int;

cpp_int pow10(long e) {
  cpp_int r = 1;
  for (long i = 0; i < e; ++i) r *= 10;
  return r;
}

Rational parse_decimal(std::string_view s, std::string_view whole) {
  std::size_t i = 0;
  bool negative = false;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
    negative = s[i] == '-';
    ++i;
  }
  cpp_int digits = 0;
  long frac_digits = 0;
  bool any_digit = false;
  bool seen_point = false;
  for (; i < s.size(); ++i) {
    const char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits = digits * 10 + (c - '0');
      any_digit = true;
      if (seen_point) ++frac_digits;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) throw DomainError("malformed number '" + std::string(whole) + "'");

  long exponent = 0;
  if (i < s.size()) {
    if (s[i] != 'e' && s[i] != 'E') throw DomainError("malformed number '" + std::string(whole) + "'");
    ++i;
    bool exp_negative = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
      exp_negative = s[i] == '-';
      ++i;
    }
    if (i == s.size()) throw DomainError("malformed exponent in '" + std::string(whole) + "'");
    for (; i < s.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(s[i])))
        throw DomainError("malformed exponent in '" + std::string(whole) + "'");
      exponent = exponent * 10 + (s[i] - '0');
      if (exponent > 4000) throw DomainError("exponent out of range in '" + std::string(whole) + "'");
    }
    if (exp_negative) exponent = -exponent;
  }

  const long scale = exponent - frac_digits;
  Rational value = scale >= 0 ? Rational(digits * pow10(scale)) : Rational(digits, pow10(-scale));
  return negative ? Rational(-value) : value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view s = trim(text);
  if (s.empty()) throw DomainError("empty number");
  const auto slash = s.find('/');
  if (slash == std::string_view::npos) return parse_decimal(s, text);
  const Rational num = parse_decimal(trim(s.substr(0, slash)), text);
  const Rational den = parse_decimal(trim(s.substr(slash + 1)), text);
  if (den == 0) throw DomainError("zero denominator in '" + std::string(text) + "'");
  return num / den;
}

Rational exact_from_double(double x) {
  if (!std::isfinite(x)) throw DomainError("non-finite value has no rational form");
  return Rational(x);
}

double to_double(const Rational& x) { return x.convert_to<double>(); }

std::string to_string(const Rational& x) { return x.str(); }

}  // namespace ewl
