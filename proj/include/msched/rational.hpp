#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

namespace msched {

/// Arbitrary-precision rational scalar for the exact numeric mode.
/// Expression templates are disabled so the type can stand in for double
/// in code templated on the scalar.
using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                               boost::multiprecision::et_off>;

template <typename Scalar>
struct scalar_traits {
  static constexpr bool is_exact = false;
  /// Comparison slack for case/subcase decisions (0 in exact mode).
  static Scalar slack() { return Scalar(1e-12); }
  static double to_double(const Scalar& x) { return static_cast<double>(x); }
  static Scalar from_ratio(std::int64_t num, std::int64_t den) {
    return Scalar(static_cast<double>(num) / static_cast<double>(den));
  }
};

template <>
struct scalar_traits<Rational> {
  static constexpr bool is_exact = true;
  static Rational slack() { return Rational(0); }
  static double to_double(const Rational& x) { return x.template convert_to<double>(); }
  static Rational from_ratio(std::int64_t num, std::int64_t den) { return Rational(num, den); }
};

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.convert_to<double>(); }

/// Parses "7", "-3/4" or a plain decimal like "0.25" into an exact rational.
inline Rational parse_rational(const std::string& text) {
  auto fail = [&] { throw std::invalid_argument("not a rational: '" + text + "'"); };
  // strip leading zeros so the integer constructor cannot read octal
  auto to_int = [&](std::string s) {
    bool neg = !s.empty() && s[0] == '-';
    if (neg || (!s.empty() && s[0] == '+')) s.erase(0, 1);
    std::size_t first = s.find_first_not_of('0');
    s = first == std::string::npos ? "0" : s.substr(first);
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) fail();
    boost::multiprecision::cpp_int v(s);
    return neg ? -v : v;
  };
  if (text.empty()) fail();
  auto slash = text.find('/');
  if (slash != std::string::npos) {
    boost::multiprecision::cpp_int num = to_int(text.substr(0, slash));
    boost::multiprecision::cpp_int den = to_int(text.substr(slash + 1));
    if (den == 0) fail();
    return Rational(num, den);
  }
  auto dot = text.find('.');
  if (dot == std::string::npos) return Rational(to_int(text));
  std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  std::size_t frac_len = text.size() - dot - 1;
  boost::multiprecision::cpp_int num = to_int(digits);
  boost::multiprecision::cpp_int den = 1;
  for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
  return Rational(num, den);
}

/// Serializes as "num/den" (or "num" for integers); round-trips exactly.
inline std::string rational_to_string(const Rational& x) {
  std::ostringstream os;
  os << numerator(x);
  if (denominator(x) != 1) os << "/" << denominator(x);
  return os.str();
}

template <typename Scalar>
Scalar parse_scalar(const std::string& text);

template <>
inline Rational parse_scalar<Rational>(const std::string& text) {
  return parse_rational(text);
}

template <>
inline double parse_scalar<double>(const std::string& text) {
  return to_double(parse_rational(text));
}

template <typename Scalar>
Scalar pow_int(Scalar base, std::int64_t exp) {
  Scalar out(1);
  while (exp > 0) {
    if (exp & 1) out *= base;
    base *= base;
    exp >>= 1;
  }
  return out;
}

using boost::multiprecision::abs;
using std::abs;

}  // namespace msched
