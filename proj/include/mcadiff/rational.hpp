#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace mcadiff {

/// Arbitrary-precision integer.
using Integer = mpz_class;

/// Arbitrary-precision rational. GMP keeps every value canonical (lowest terms, positive
/// denominator) after each arithmetic operation.
using Rational = mpq_class;

/// Parses "3", "-5/2", "0.3333" or "2.5e-3" into an exact rational. Decimal strings are
/// read as exact decimals, so "0.1" is 1/10 rather than the nearest double.
Rational parse_rational(std::string_view text);

/// Formats as "num/den" (the denominator is always printed).
std::string to_fraction_string(const Rational& value);

Rational pow(const Rational& base, unsigned long exponent);

/// num/den in lowest terms. Requires den != 0.
Rational ratio(long num, long den);

inline double to_double(double value) { return value; }
inline double to_double(const Rational& value) { return value.get_d(); }

}  // namespace mcadiff
