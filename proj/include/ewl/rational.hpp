#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace ewl {

using Rational = boost::multiprecision::cpp_rational;

/// Parses "3", "-2.5", "1e-3", "2.999E+1" or "52/11" into an exact rational.
/// Throws DomainError on malformed input.
Rational parse_rational(std::string_view text);

/// Exact value of a finite double (every finite double is a dyadic rational).
Rational exact_from_double(double x);

double to_double(const Rational& x);

std::string to_string(const Rational& x);

}  // namespace ewl
