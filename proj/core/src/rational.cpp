#include "lexrsm/rational.hpp"

#include <stdexcept>

namespace lexrsm {

namespace {

// Strictly decimal: a leading zero must not flip the base to octal, and
// anything but [+-]?[0-9]+ is rejected.
Int parse_decimal_int(const std::string& t, bool empty_is_zero = false) {
  bool neg = !t.empty() && t[0] == '-';
  std::string digits = (!t.empty() && (t[0] == '-' || t[0] == '+'))
                           ? t.substr(1)
                           : t;
  if (digits.empty()) {
    if (empty_is_zero) return Int(0);
    throw std::invalid_argument("bad integer literal: " + t);
  }
  if (digits.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument("bad integer literal: " + t);
  size_t pos = digits.find_first_not_of('0');
  Int v = pos == std::string::npos ? Int(0) : Int(digits.substr(pos));
  return neg ? Int(-v) : v;
}

}  // namespace

Rational parse_rational(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    Int num = parse_decimal_int(s.substr(0, slash));
    Int den = parse_decimal_int(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator: " + s);
    return Rational(num, den);
  }
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    std::string head = s.substr(0, dot);
    std::string frac = s.substr(dot + 1);
    if (frac.find_first_not_of("0123456789") != std::string::npos)
      throw std::invalid_argument("bad decimal literal: " + s);
    bool neg = !head.empty() && head[0] == '-';
    Int ipart = parse_decimal_int(head, true);
    if (ipart < 0) ipart = -ipart;
    Int scale = 1;
    for (size_t i = 0; i < frac.size(); ++i) scale *= 10;
    Int num = ipart * scale +
              (frac.empty() ? Int(0) : parse_decimal_int(frac));
    Rational r(num, scale);
    return neg ? Rational(-r) : r;
  }
  return Rational(parse_decimal_int(s));
}

std::string rat_str(const Rational& r) {
  std::string s = numerator(r).str();
  if (denominator(r) != 1) s += "/" + denominator(r).str();
  return s;
}

double rat_double(const Rational& r) { return r.convert_to<double>(); }

long floor_log2(const Rational& r) {
  if (r <= 0) throw std::invalid_argument("floor_log2 needs a positive value");
  long k = 0;
  Rational v = r;
  while (v >= 2) { v /= 2; ++k; }
  while (v < 1) { v *= 2; --k; }
  return k;
}

}  // namespace lexrsm
