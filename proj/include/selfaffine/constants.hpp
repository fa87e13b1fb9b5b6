#pragma once

#include <stdexcept>

#include "selfaffine/rational.hpp"

namespace selfaffine {

// Certified real enclosure: lo <= true value <= hi by construction.
struct Enclosure {
    double lo = 0;
    double hi = 0;
    double width() const { return hi - lo; }
    bool contains(double x) const { return lo <= x && x <= hi; }
};

struct PrecisionExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// n-th Thue-Morse symbol, 1-indexed: parity of the 1-bits of n-1
// (so the sequence starts 0,1,1,0,1,0,0,1,...). Throws for n < 1.
int thue_morse(long n);

// Certified enclosure of the Komornik-Loreti constant, the unique x > 1 with
// sum_{n>=1} tm(n) x^{-n+1} = 1. Bisection on partial sums with the rigorous
// tail bracket [0, x^{-N}/(1 - 1/x)]; float rounding absorbed by a 1+1e-12
// per-term slack. Throws PrecisionExhausted if `precision` is below what
// double bisection can certify.
Enclosure komornik_loreti(double precision);

// Certified enclosure of (1+sqrt(5))/2 via exact rational bisection of
// x^2 - x - 1 on [1,2].
Enclosure golden_ratio(double precision);

// Exact sign of beta - G for rational beta > 0: sign of beta^2 - beta - 1
// (never 0: G is irrational).
int compare_with_golden(const Rational& beta);

// Exact placement of a rational beta against beta*: -1 if beta < beta*,
// +1 if beta > beta*. Refines the enclosure on demand; if beta is still
// inside the tightest enclosure double precision supports, throws
// PrecisionExhausted (an exact rational equal to beta* cannot exist, but we
// cannot certify which side it is on).
int compare_with_komornik_loreti(const Rational& beta);

}  // namespace selfaffine
