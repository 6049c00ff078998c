#pragma once

#include <cstdint>
#include <string>

#include <boost/rational.hpp>

// Under C++20 rewritten comparisons, Boost's mixed rational/integer operator==
// selects itself in reverse and recurses. Exact non-template overloads win.
namespace boost {
constexpr bool operator==(const rational<std::int64_t>& a, int b) {
  return a.denominator() == 1 && a.numerator() == b;
}
constexpr bool operator==(const rational<std::int64_t>& a, std::int64_t b) {
  return a.denominator() == 1 && a.numerator() == b;
}
}  // namespace boost

namespace rombit {

/// Exact value type used for weights, values and times.
using Rational = boost::rational<std::int64_t>;

inline double to_double(const Rational& q) {
  return static_cast<double>(q.numerator()) / static_cast<double>(q.denominator());
}

/// Closest rational with denominator <= max_den (continued fractions).
Rational approximate(double x, std::int64_t max_den = 1'000'000);

std::string to_string(const Rational& q);

/// Parses "a/b", an integer or a decimal (approximated).
Rational parse_rational(const std::string& text);

}  // namespace rombit
