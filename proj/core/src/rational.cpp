#include "weylgeom/rational.hpp"

#include <cctype>
#include <cmath>

#include "weylgeom/error.hpp"

namespace weylgeom {

namespace {

BigInt parse_integer(std::string_view digits, std::string_view whole) {
  if (digits.empty()) throw Error(Errc::InvalidArgument, "cannot parse rational '" + std::string(whole) + "'");
  BigInt v = 0;
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw Error(Errc::InvalidArgument, "cannot parse rational '" + std::string(whole) + "'");
    v = v * 10 + (c - '0');
  }
  return v;
}

BigInt pow10(long e) {
  BigInt r = 1;
  for (long i = 0; i < e; ++i) r *= 10;
  return r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  Rational out;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    const BigInt num = parse_integer(s.substr(0, slash), text);
    const BigInt den = parse_integer(s.substr(slash + 1), text);
    if (den == 0) throw Error(Errc::InvalidArgument, "zero denominator in '" + std::string(text) + "'");
    out = Rational(num, den);
  } else {
    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
      std::string_view es = s.substr(e + 1);
      bool eneg = false;
      if (!es.empty() && (es.front() == '-' || es.front() == '+')) {
        eneg = es.front() == '-';
        es.remove_prefix(1);
      }
      const BigInt ev = parse_integer(es, text);
      if (ev > 10000) throw Error(Errc::InvalidArgument, "exponent too large in '" + std::string(text) + "'");
      exponent = ev.convert_to<long>() * (eneg ? -1 : 1);
      s = s.substr(0, e);
    }
    std::string digits;
    long frac_digits = 0;
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
      digits = std::string(s.substr(0, dot)) + std::string(s.substr(dot + 1));
      frac_digits = static_cast<long>(s.size() - dot - 1);
    } else {
      digits = std::string(s);
    }
    const BigInt mant = parse_integer(digits, text);
    const long shift = exponent - frac_digits;
    out = shift >= 0 ? Rational(mant * pow10(shift)) : Rational(mant, pow10(-shift));
  }
  return negative ? Rational(-out) : out;
}

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw Error(Errc::InvalidArgument, "non-finite value cannot be made rational");
  int exp = 0;
  const double mant = std::frexp(x, &exp);
  // mant * 2^53 is an exact integer.
  const auto m = static_cast<long long>(std::ldexp(mant, 53));
  exp -= 53;
  Rational r(m);
  if (exp > 0) {
    r *= Rational(BigInt(1) << exp);
  } else if (exp < 0) {
    r /= Rational(BigInt(1) << (-exp));
  }
  return r;
}

std::string to_string(const Rational& q) {
  const BigInt num = boost::multiprecision::numerator(q);
  const BigInt den = boost::multiprecision::denominator(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

}  // namespace weylgeom
