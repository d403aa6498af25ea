#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <string>
#include <string_view>

namespace refinet {

// Exact rational scalar used for every weight, mass, level and price.
// Expression templates are disabled so `auto` never captures a lazy expression.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

// Accepts "p/q", integers, and plain decimals ("0.25", "-1.5", "3e-2").
// Throws std::invalid_argument on anything else or a zero denominator.
Rational parse_rational(std::string_view text);

// "p/q" in lowest terms, or "p" when the denominator is 1.
std::string to_string(const Rational& q);

double to_double(const Rational& q);

// Exact binary value of a finite double.
Rational from_double(double v);

inline Rational rmin(const Rational& a, const Rational& b) { return a < b ? a : b; }
inline Rational rmax(const Rational& a, const Rational& b) { return a < b ? b : a; }
inline Rational positive_part(const Rational& a) { return a > 0 ? a : Rational(0); }

}  // namespace refinet
