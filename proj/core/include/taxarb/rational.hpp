#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>

namespace taxarb {

// Exact arbitrary precision rational. mpq_class values stay canonical
// (lowest terms, positive denominator) as long as every value passes
// through canonicalize() once on construction, which the helpers below
// and all gmpxx arithmetic guarantee.
using Rational = mpq_class;
using Integer = mpz_class;

Rational rat(long num, long den = 1);

// Accepts an optional sign followed by digits, optionally "/digits".
// Decimal points, exponents, whitespace and empty fields are rejected,
// as is a zero denominator.
std::optional<Rational> try_parse_rational(const std::string& text);

// As try_parse_rational but throws std::invalid_argument on bad input.
Rational parse_rational(const std::string& text);

// "p/q" in lowest terms, or just "p" when the denominator is 1.
std::string format_rational(const Rational& value);

// value^exponent for any integer exponent; negative exponents require
// a nonzero value.
Rational rational_pow(const Rational& value, long exponent);

}  // namespace taxarb
