#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "selfaffine/linalg.hpp"
#include "selfaffine/rational.hpp"

namespace selfaffine {

enum class BlockKind { RealPositive, RealNegative, Jordan, Rotation };

struct AngleTag {
    enum class Type { None, RationalPi, Irrational };
    Type type = Type::None;
    long p = 0, s = 1;   // RationalPi: arg = (p/s)*pi, 0 < p/s < 1, gcd(p,s) = 1
    double radians = 0;  // Irrational: arg in radians
    double value() const;  // arg in radians for either tagged type
};

struct SpectralBlock {
    BlockKind kind = BlockKind::RealPositive;
    Rational modulus_exact;  // exact when the spec came from config text
    double modulus = 0;
    AngleTag angle;   // Rotation always tagged; Jordan optionally (complex pair)
    int size = 1;     // Jordan chain length; 1 otherwise

    // Real dimension contributed: Rotation and tagged Jordan count double.
    int dim() const;
    bool is_complex() const { return angle.type != AngleTag::Type::None; }
};

struct SpectralSpec {
    enum class Provenance { Exact, HeuristicFromMatrix };
    std::vector<SpectralBlock> blocks;
    Provenance provenance = Provenance::Exact;
    double tolerance = 0;  // meaningful for HeuristicFromMatrix

    int dimension() const;
};

struct RawSystem {
    int d = 0;
    bool exact = false;        // all inputs rational: exact arithmetic available
    Mat<Rational> M_exact;     // filled iff exact
    Vec<Rational> u_exact;     // filled iff exact
    Mat<double> M;             // always filled
    Vec<double> u;             // always filled
};

// Validates det != 0, spectral radius < 1 (numeric check), u != 0.
// Cyclicity is deliberately not required here: powers of valid systems can be
// derogatory and are still legitimate inputs to the per-address tools.
RawSystem make_raw_system(Mat<Rational> M, Vec<Rational> u, bool exact);
RawSystem make_raw_system_float(Mat<double> M, Vec<double> u);

double spectral_radius(const Mat<double>& M);

struct ParsedInput {
    std::variant<SpectralSpec, RawSystem> value;
    std::vector<std::string> warnings;

    bool is_spec() const { return std::holds_alternative<SpectralSpec>(value); }
    const SpectralSpec& spec() const { return std::get<SpectralSpec>(value); }
    const RawSystem& raw() const { return std::get<RawSystem>(value); }
};

// Parses the key-value configuration grammar (see docs/formats.md): either a
// list of `block` lines (exact spectral input) or a `matrix` section with
// `row`/`u` lines. Throws std::invalid_argument naming the offending token.
ParsedInput parse_spec(const std::string& text);

struct KrylovResult {
    bool cyclic = false;
    std::size_t rank = 0;
};

// rank[u, Mu, ..., M^{d-1}u] == d; exact rank in exact mode, tolerance-based
// (relative threshold 1e-9) in float mode.
KrylovResult krylov_cyclic_check(const RawSystem& sys);

// Best rational approximation p/s to t with s <= cap, by continued fractions
// with semiconvergents. Exposed for the angle-tagging tests.
struct RationalApprox {
    long p = 0, s = 1;
    double error = 0;
};
RationalApprox best_rational_approx(double t, long cap);

// Heuristic spectral decomposition of a valid *cyclic* system: numeric
// eigenvalues clustered, Jordan structure confirmed by nullity checks, each
// argument tested against rational multiples of pi with denominator <= cap.
// Throws std::runtime_error("ill-conditioned eigenstructure") when the
// defective-vs-diagonalizable call is below tolerance.
SpectralSpec eigenstructure(const RawSystem& sys, long angle_denominator_cap = 64,
                            double tolerance = 1e-9);

// Least q >= 1 with kappa^q real for every block; lcm of the angle
// denominators (real blocks contribute 1). Throws if any block is tagged
// Irrational.
long minimal_real_power(const SpectralSpec& spec);

// Sign of kappa^q for one block: (-1)^(q*p/s) for RationalPi, (-1)^q for
// RealNegative, +1 for RealPositive. Pre: q*(p/s) integral.
int sign_of_power(const SpectralBlock& block, long q);

// Block-diagonal real canonical matrix for a spec plus a cyclic digit vector
// (float mode). Used by round-trip tests and as a spec-to-system bridge.
RawSystem realize_matrix(const SpectralSpec& spec);

}  // namespace selfaffine
