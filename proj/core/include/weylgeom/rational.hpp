#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace weylgeom {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Accepts "7", "-3/4", "0.125", "2.5e-3". Decimal input is converted
// exactly (0.1 -> 1/10).
Rational parse_rational(std::string_view text);
// Exact value of a binary double.
Rational rational_from_double(double x);
// "p/q", or "p" when the denominator is 1.
std::string to_string(const Rational& q);
double to_double(const Rational& q);

}  // namespace weylgeom
