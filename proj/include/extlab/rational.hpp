#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace extlab {

/// Exact rational number. gmp keeps the value canonical (reduced, positive denominator).
using Rational = mpq_class;

/// Parses "p/q", an integer, or a decimal such as "-1.25" or "3e-2".
/// Throws std::invalid_argument on malformed input or a zero denominator.
Rational parse_rational(std::string_view text);

/// "p/q" form, or just "p" when the denominator is 1.
std::string to_string(const Rational& r);

/// Exact decimal form when the denominator has only factors 2 and 5, "p/q" otherwise.
std::string to_decimal_string(const Rational& r);

/// num/den in canonical form (gmp's two-argument constructor does not reduce).
Rational ratio(long num, long den);

double to_double(const Rational& r);

/// Exact conversion of a finite double.
Rational from_double(double x);

}  // namespace extlab
