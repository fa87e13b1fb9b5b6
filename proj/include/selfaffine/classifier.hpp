#pragma once

#include <optional>
#include <vector>

#include "selfaffine/constants.hpp"
#include "selfaffine/spectral.hpp"

namespace selfaffine {

enum class UniquenessVerdict {
    FiniteNonEmpty,
    InfiniteCountable,
    UncountableZeroDim,
    PositiveHausdorffDim
};

enum class ClassifierRule { Jordan, IrrationalAngle, DistinctModuli, RationalEqualModuli };

enum class Confidence { Exact, Heuristic };

struct UniquenessClass {
    UniquenessVerdict verdict{};
    ClassifierRule rule{};
    // Present only in the RationalEqualModuli case:
    std::optional<Rational> beta_exact;
    double beta = 0;
    long q = 0;
    bool sign_conflict = false;
    std::vector<int> block_signs;  // sign of kappa^q per block, same order as spec
    Confidence confidence = Confidence::Exact;
    // Bucket boundaries consulted (for the report trace):
    std::optional<Enclosure> golden_used;
    std::optional<Enclosure> komornik_loreti_used;
};

// Rejects derogatory specs (a repeated eigenvalue across blocks means no
// cyclic vector exists). Called by the classifier; exposed for parse-time use.
void validate_spec(const SpectralSpec& spec);

// Case dispatch, in order: any Jordan block; any irrational angle; two
// distinct moduli; otherwise the rational-equal-moduli rule with
// beta = m^{-2q} under a sign conflict and m^{-q} without one, bucketed
// against G and a certified enclosure of the Komornik-Loreti constant.
// Throws PrecisionExhausted when beta cannot be separated from beta*.
UniquenessClass classify_uniqueness(const SpectralSpec& spec);

struct InteriorVerdict {
    enum class V { NonEmptyByTheorem, EmptyNullSet, Unknown };
    V verdict = V::Unknown;
    int d = 0;
    double det_abs = 0;
    std::optional<Rational> det_abs_exact;
    double threshold_hi = 0;  // 2^{-1/d}
    double threshold_lo = 0.5;
};

enum class Connectivity { PathConnected, Unknown };

// |det M|: product of block moduli^(block dimension) in spec mode, exact
// determinant in matrix mode when available.
InteriorVerdict interior_verdict(const SpectralSpec& spec);
InteriorVerdict interior_verdict(const RawSystem& sys);

Connectivity connectivity_verdict(const SpectralSpec& spec);
Connectivity connectivity_verdict(const RawSystem& sys);

}  // namespace selfaffine
