#include "selfaffine/constants.hpp"

#include <bit>
#include <cmath>
#include <limits>

namespace selfaffine {

int thue_morse(long n) {
    if (n < 1) throw std::invalid_argument("thue_morse index must be >= 1");
    return std::popcount(static_cast<unsigned long>(n - 1)) & 1;
}

namespace {

constexpr double kTermSlack = 1e-12;  // extra per-term cushion on the error bound

// Certified sign of f(x) = sum_{n=1}^inf tm(n) x^{-n+1} - 1 for x in (1,2],
// using N terms. Returns +1 / -1 when provable, 0 when the error bound
// straddles. The accumulated float error (forward analysis: one add and one
// divide per term on nonnegative terms) is multiplied by (1+1e-12)^terms.
int certified_sign(double x, int terms) {
    double s = 0, p = 1;  // p = x^{-n+1}
    for (int n = 1; n <= terms; ++n) {
        if (thue_morse(n)) s += p;
        p /= x;
    }
    // p is now ~ x^{-terms}; rigorous tail: 0 <= tail <= x^{-terms}/(1 - 1/x).
    double cushion = std::pow(1.0 + kTermSlack, terms);
    double tail_hi = p / (1.0 - 1.0 / x) * cushion;
    double eps = std::numeric_limits<double>::epsilon();
    double err = 2.0 * terms * eps * (s + 1.0) * cushion;
    double f_lo = (s - err) - 1.0;           // true f >= f_lo
    double f_hi = (s + err) + tail_hi - 1.0; // true f <= f_hi
    if (f_lo > 0) return 1;
    if (f_hi < 0) return -1;
    return 0;
}

}  // namespace

Enclosure komornik_loreti(double precision) {
    if (!(precision > 0)) throw std::invalid_argument("precision must be positive");
    // Tail at x >= 1.5 is <= 1.5^-N * 3; size N so the tail cannot blur the
    // requested width.
    double target = std::max(precision / 4.0, 1e-18);
    int terms = 8;
    while (std::pow(1.5, -terms) * 3.0 > target && terms < 400) ++terms;

    double lo = 1.5, hi = 2.0;  // certified: f(1.5) > 0 > f(2)
    if (certified_sign(lo, terms) <= 0 || certified_sign(hi, terms) >= 0)
        throw std::logic_error("komornik_loreti: initial bracket lost");
    while (hi - lo > precision) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // double grid exhausted
        int s = certified_sign(mid, terms);
        if (s > 0)
            lo = mid;
        else if (s < 0)
            hi = mid;
        else
            break;  // slack straddles zero: cannot certify further
    }
    if (hi - lo > precision)
        throw PrecisionExhausted("komornik_loreti: requested precision below float resolution");
    return {lo, hi};
}

Enclosure golden_ratio(double precision) {
    if (!(precision > 0)) throw std::invalid_argument("precision must be positive");
    Rational lo(1), hi(2);  // (x^2 - x - 1) changes sign on [1,2]
    Rational prec = rational_from_double(std::max(precision / 2.0, 1e-17));
    while (hi - lo > prec) {
        Rational mid = (lo + hi) / 2;
        if (sign(mid * mid - mid - 1) < 0)
            lo = mid;
        else
            hi = mid;
    }
    // mpq -> double truncates toward zero; nudge hi upward to stay certified.
    return {to_double(lo), std::nextafter(to_double(hi), 2.0)};
}

int compare_with_golden(const Rational& beta) {
    int s = sign(beta * beta - beta - 1);
    if (s == 0) throw std::logic_error("rational beta cannot equal the golden ratio");
    return s;
}

int compare_with_komornik_loreti(const Rational& beta) {
    for (double prec : {1e-4, 1e-8, 1e-12, 1e-15, 4e-16}) {
        Enclosure e;
        try {
            e = komornik_loreti(prec);
        } catch (const PrecisionExhausted&) {
            break;
        }
        if (beta < rational_from_double(e.lo)) return -1;
        if (beta > rational_from_double(e.hi)) return 1;
    }
    throw PrecisionExhausted(
        "beta lies inside the tightest certifiable enclosure of the Komornik-Loreti constant");
}

}  // namespace selfaffine
