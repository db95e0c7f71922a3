#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace fpplab {

using Rational = mpq_class;
using BigInt = mpz_class;

/// Parses "p/q", "p", or a finite decimal such as "0.25" into a canonical rational.
/// Throws std::invalid_argument on malformed input or a zero denominator.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" rendering; integers render without a denominator.
std::string to_string(const Rational& r);
std::string to_string(const BigInt& z);

double to_double(const Rational& r);

/// Natural log of a positive big integer, safe far beyond double range.
double log_bigint(const BigInt& z);

/// Smallest positive integer D such that D*r is integral for every r given.
BigInt common_denominator(const BigInt& acc, const Rational& r);

inline Rational rational(long num, long den = 1) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

}  // namespace fpplab
