#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

namespace lexrsm {

using Int = boost::multiprecision::cpp_int;

// Exact rational arithmetic. cpp_rational keeps values in lowest terms with a
// positive denominator, which is exactly the invariant the rest of the code
// relies on.
using Rational = boost::multiprecision::cpp_rational;

// Accepts "7", "-3", "3/4", "-3/4", "2.5", "-0.125".
Rational parse_rational(const std::string& s);

// "7", "-3/4". Never emits a decimal point.
std::string rat_str(const Rational& r);

double rat_double(const Rational& r);

// Largest k with 2^k <= r, for r > 0.
long floor_log2(const Rational& r);

}  // namespace lexrsm
