#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace selfaffine {

using Rational = mpq_class;

// Result of parsing a numeric literal. Finite decimals are exact rationals,
// but the surface form matters: matrix entries written as decimals put the
// whole system into float mode, while block moduli stay exact.
struct ParsedNumber {
    Rational value;
    bool was_decimal = false;
};

// Accepts "a/b", integers, and finite decimals with optional sign/exponent
// ("-0.95", "1e-3", "12.5e2"). Throws std::invalid_argument on anything else.
ParsedNumber parse_number(const std::string& text);

// value^e for integer e (e < 0 requires value != 0).
Rational pow_rational(const Rational& value, long e);

inline Rational abs_rational(const Rational& v) { return v < 0 ? Rational(-v) : v; }

inline int sign(const Rational& v) { return sgn(v); }

std::string to_string(const Rational& v);

// GMP's mpq -> double conversion truncates toward zero (at most 1 ulp below
// the true magnitude). Callers that need a certified upper bound on a
// positive quantity must bump the result with nextafter.
inline double to_double(const Rational& v) { return v.get_d(); }

// Exact rational from a double (every finite double is a dyadic rational).
Rational rational_from_double(double x);

std::size_t hash_rational(const Rational& v);

}  // namespace selfaffine
