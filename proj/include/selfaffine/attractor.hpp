#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "selfaffine/spectral.hpp"

namespace selfaffine {

struct NormCertificateUnavailable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Eventually periodic symbolic input: head then either a Free tail (finite
// information) or an infinitely repeated period.
struct Address {
    std::vector<int> head;    // symbols in {-1,+1}
    std::vector<int> period;  // nonempty <=> eventually periodic

    bool periodic() const { return !period.empty(); }
    std::size_t preperiod() const { return head.size(); }
    // Symbol at position k; requires a periodic tail once k runs off the head.
    int at(std::size_t k) const;
};

// Text form: '+' / '-' symbols, optional parenthesized period: "+-(+-)",
// "(+)", "++-" (Free tail). Throws std::invalid_argument on anything else.
Address parse_address(const std::string& text);
std::string format_address(const Address& a);

// Smallest m <= cap with rho = ||M^m||_inf < 1; exact over Rational.
template <class T>
struct NormCertificate {
    int m = 0;
    T rho{};
};

template <class T>
NormCertificate<T> norm_certificate(const Mat<T>& M, int cap = 32) {
    Mat<T> p = M;
    for (int m = 1; m <= cap; ++m) {
        T rho = p.inf_norm();
        if (rho < T(1)) return {m, rho};
        p = p * M;
    }
    throw NormCertificateUnavailable(
        "norm certificate unavailable: no m <= " + std::to_string(cap) +
        " with ||M^m|| < 1 (raise the cap)");
}

// Certified upper bound on sum_{k>=n} ||M^k u||_inf via the m-step norm
// certificate. Rigorous in exact mode; float mode multiplies by 1+1e-9.
double tail_bound(const RawSystem& sys, int n);
Rational tail_bound_exact(const RawSystem& sys, int n);

struct Projection {
    Vec<double> point;  // sum_{k<n} a_k M^k u
    double radius;      // T_n: true pi_M(a) lies within this ball
};

Projection project_address(const RawSystem& sys, const Address& a, int n);

// Exact limit of an eventually periodic address (exact systems only): solves
// the finite linear system for the periodic tail.
Vec<Rational> project_exact_periodic(const RawSystem& sys, const Address& a);

// Deterministic chaos game: x <- Mx +/- u from x = 0 with 64 burn-in steps.
std::vector<Vec<double>> chaos_game(const RawSystem& sys, std::size_t count, std::uint64_t seed);

struct CylinderCloud {
    int depth = 0;
    double tail_radius = 0;  // T_depth, shared by all centers
    std::vector<Vec<double>> centers;                      // 2^depth, word index order
    std::optional<std::vector<Vec<Rational>>> centers_exact;  // exact systems only
};

// Word index i encodes symbols a_k = +1 iff bit k of i is set; centers are
// emitted in index order (the parallel version partitions the index space and
// is bit-identical to the serial one).
CylinderCloud cylinder_cloud(const RawSystem& sys, int depth);
CylinderCloud cylinder_cloud_serial(const RawSystem& sys, int depth);

struct DecompositionReport {
    bool equal = false;
    bool exact = false;  // float systems only get 1e-9 comparisons, flagged here
    int depth = 0;
    int blocks = 0;
    std::optional<std::size_t> first_mismatch_index;
    std::string detail;
};

// Verifies that depth-(n*blocks) cylinder centers of the {0,1}-digit attractor
// equal, as a multiset, the Minkowski sum of M^j * (depth-n centers for M^blocks),
// j < blocks. Exact multiset equality in exact mode.
DecompositionReport minkowski_decomposition_check(const RawSystem& sys, int blocks, int depth);

struct InteriorCertificate {
    enum class Status { Certified, Inconclusive };
    Status status = Status::Inconclusive;
    int depth = 0;
    double r = 0, h = 0;
    double sigma_min = 0;          // smallest singular value of M^depth
    double effective_radius = 0;   // r*sigma_min - h*sqrt(d)/2
    std::size_t lattice_points = 0, uncovered = 0;
    std::string note;
};

// Self-covering test: every h-lattice point within r + h*sqrt(d)/2 of x0 must
// lie within (r*sigma_min(M^n) - h*sqrt(d)/2)/(1+1e-9) of some depth-n center
// + M^n x0. Certified implies B(x0,r) is contained in the attractor (up to
// the documented float slack).
InteriorCertificate interior_certificate(const RawSystem& sys, const Vec<double>& x0, double r,
                                         int depth, double h);
InteriorCertificate interior_certificate_serial(const RawSystem& sys, const Vec<double>& x0,
                                                double r, int depth, double h);

// Pinned search schedule: depth n = 1..max_depth ascending, then radius
// r = T0 * 2^-j for j = 1..max_radius_steps, grid h = r*sigma_min(M^n)/(2 sqrt d).
// Tries whose lattice would exceed `lattice_budget` points are skipped as
// inconclusive. Returns the first Certified triple, or nullopt.
std::optional<InteriorCertificate> interior_search(const RawSystem& sys, int max_depth = 24,
                                                   int max_radius_steps = 10,
                                                   std::size_t lattice_budget = 4000000);

struct Viewport {
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
};

enum class RenderMode { Binary, HitCount };

struct Pgm {
    int width = 0, height = 0;
    std::vector<std::uint8_t> pixels;  // row-major, top row first

    std::string serialize() const;  // binary "P5" payload
};

// Points outside the viewport are skipped; 1-dimensional points render on the
// y = 0 line. Throws std::invalid_argument for an empty viewport.
Pgm render_image(const std::vector<Vec<double>>& points, const Viewport& vp, int width, int height,
                 RenderMode mode = RenderMode::Binary);

}  // namespace selfaffine
