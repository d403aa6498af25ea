#include "refinet/rational.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace refinet {

namespace {

// mpz reads a leading 0 as an octal prefix.
boost::multiprecision::mpz_int decimal_digits(std::string_view s) {
  while (s.size() > 1 && s.front() == '0') s.remove_prefix(1);
  return boost::multiprecision::mpz_int{std::string(s.empty() ? "0" : s)};
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

Rational parse_integer(std::string_view s) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
  boost::multiprecision::mpz_int z = decimal_digits(s);
  return negative ? Rational(-z) : Rational(z);
}

Rational pow10(long e) {
  boost::multiprecision::mpz_int p = 1;
  for (long i = 0; i < (e < 0 ? -e : e); ++i) p *= 10;
  return e < 0 ? Rational(1) / Rational(p) : Rational(p);
}

Rational parse_decimal(std::string_view s) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    Rational ex = parse_integer(s.substr(e + 1));
    if (abs(ex) > 4096) throw std::invalid_argument("exponent out of range");
    exponent = static_cast<long>(ex.convert_to<double>());
    s = s.substr(0, e);
  }
  std::string_view int_part = s;
  std::string_view frac_part;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    int_part = s.substr(0, dot);
    frac_part = s.substr(dot + 1);
  }
  if (int_part.empty() && frac_part.empty()) throw std::invalid_argument("empty number");
  if ((!int_part.empty() && !all_digits(int_part)) || (!frac_part.empty() && !all_digits(frac_part))) {
    throw std::invalid_argument("malformed decimal: '" + std::string(s) + "'");
  }
  std::string digits = std::string(int_part) + std::string(frac_part);
  boost::multiprecision::mpz_int mant = decimal_digits(digits);
  Rational value = Rational(mant) * pow10(exponent - static_cast<long>(frac_part.size()));
  return negative ? Rational(-value) : value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = trim(text);
  if (s.empty()) throw std::invalid_argument("empty rational");
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Rational num = parse_integer(trim(s.substr(0, slash)));
    Rational den = parse_integer(trim(s.substr(slash + 1)));
    if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(s) + "'");
    return num / den;
  }
  return parse_decimal(s);
}

std::string to_string(const Rational& q) { return q.str(); }

double to_double(const Rational& q) { return q.convert_to<double>(); }

Rational from_double(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("non-finite double");
  return Rational(v);
}

}  // namespace refinet
