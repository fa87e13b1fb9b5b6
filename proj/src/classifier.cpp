#include "selfaffine/classifier.hpp"

#include <cmath>
#include <limits>

namespace selfaffine {

namespace {

bool moduli_all_equal(const SpectralSpec& spec) {
    if (spec.blocks.size() < 2) return true;
    if (spec.provenance == SpectralSpec::Provenance::Exact) {
        for (std::size_t i = 1; i < spec.blocks.size(); ++i)
            if (spec.blocks[i].modulus_exact != spec.blocks[0].modulus_exact) return false;
        return true;
    }
    double tol = std::max(spec.tolerance, 64.0 * std::sqrt(std::numeric_limits<double>::epsilon()));
    for (std::size_t i = 1; i < spec.blocks.size(); ++i)
        if (std::fabs(spec.blocks[i].modulus - spec.blocks[0].modulus) > tol) return false;
    return true;
}

// Eigenvalue identity of a block for the derogatory check; real eigenvalues
// are (signed modulus, no angle), complex ones (modulus, p/s | radians).
bool same_eigenvalue(const SpectralBlock& a, const SpectralBlock& b) {
    bool a_real = !a.is_complex() && a.kind != BlockKind::Rotation;
    bool b_real = !b.is_complex() && b.kind != BlockKind::Rotation;
    if (a_real != b_real) return false;
    bool exact = a.modulus_exact == b.modulus_exact;
    bool close = exact || std::fabs(a.modulus - b.modulus) <=
                              64.0 * std::sqrt(std::numeric_limits<double>::epsilon());
    if (!close) return false;
    if (a_real) {
        bool a_neg = a.kind == BlockKind::RealNegative;
        bool b_neg = b.kind == BlockKind::RealNegative;
        return a_neg == b_neg;
    }
    if (a.angle.type != b.angle.type) return false;
    if (a.angle.type == AngleTag::Type::RationalPi)
        return a.angle.p == b.angle.p && a.angle.s == b.angle.s;
    return std::fabs(a.angle.radians - b.angle.radians) <= 1e-12;
}

}  // namespace

void validate_spec(const SpectralSpec& spec) {
    if (spec.blocks.empty()) throw std::invalid_argument("spec has no blocks");
    for (const auto& b : spec.blocks) {
        if (!(b.modulus > 0 && b.modulus < 1))
            throw std::invalid_argument("block modulus not in (0,1)");
        if (b.kind == BlockKind::Jordan && b.size < 2)
            throw std::invalid_argument("jordan block requires size >= 2");
        if (b.kind == BlockKind::Rotation && b.angle.type == AngleTag::Type::None)
            throw std::invalid_argument("rotation block requires an angle");
    }
    for (std::size_t i = 0; i < spec.blocks.size(); ++i)
        for (std::size_t j = i + 1; j < spec.blocks.size(); ++j)
            if (same_eigenvalue(spec.blocks[i], spec.blocks[j]))
                throw std::invalid_argument(
                    "repeated eigenvalue across blocks: matrix is derogatory, no cyclic vector "
                    "exists");
}

UniquenessClass classify_uniqueness(const SpectralSpec& spec) {
    validate_spec(spec);

    UniquenessClass out;
    out.confidence = spec.provenance == SpectralSpec::Provenance::Exact ? Confidence::Exact
                                                                        : Confidence::Heuristic;

    for (const auto& b : spec.blocks)
        if (b.kind == BlockKind::Jordan) {
            out.rule = ClassifierRule::Jordan;
            out.verdict = UniquenessVerdict::PositiveHausdorffDim;
            return out;
        }
    for (const auto& b : spec.blocks)
        if (b.angle.type == AngleTag::Type::Irrational) {
            out.rule = ClassifierRule::IrrationalAngle;
            out.verdict = UniquenessVerdict::PositiveHausdorffDim;
            return out;
        }
    if (!moduli_all_equal(spec)) {
        out.rule = ClassifierRule::DistinctModuli;
        out.verdict = UniquenessVerdict::PositiveHausdorffDim;
        return out;
    }

    out.rule = ClassifierRule::RationalEqualModuli;
    out.q = minimal_real_power(spec);
    for (const auto& b : spec.blocks) out.block_signs.push_back(sign_of_power(b, out.q));
    for (int s : out.block_signs) out.sign_conflict |= s != out.block_signs[0];

    const Rational& m = spec.blocks[0].modulus_exact;
    Rational beta = pow_rational(m, out.sign_conflict ? -2 * out.q : -out.q);
    out.beta_exact = beta;
    out.beta = to_double(beta);
    out.golden_used = golden_ratio(1e-12);
    out.komornik_loreti_used = komornik_loreti(1e-8);

    if (compare_with_golden(beta) < 0) {
        out.verdict = UniquenessVerdict::FiniteNonEmpty;  // beta in (1, G]
    } else if (compare_with_komornik_loreti(beta) < 0) {
        out.verdict = UniquenessVerdict::InfiniteCountable;  // beta in (G, beta*)
    } else {
        out.verdict = UniquenessVerdict::PositiveHausdorffDim;  // beta > beta*
    }
    // compare_with_komornik_loreti throws PrecisionExhausted when beta cannot
    // be separated from beta*; {beta*} itself (UncountableZeroDim) is not
    // certifiable from rational input, and we refuse to guess.
    return out;
}

namespace {

InteriorVerdict verdict_from_det(int d, double det_abs, std::optional<Rational> det_exact) {
    InteriorVerdict v;
    v.d = d;
    v.det_abs = det_abs;
    v.det_abs_exact = det_exact;
    v.threshold_hi = std::pow(2.0, -1.0 / d);
    v.threshold_lo = 0.5;
    if (det_exact) {
        // det_abs >= 2^{-1/d}  <=>  det_abs^d >= 1/2, exactly decidable.
        Rational p = pow_rational(*det_exact, d);
        if (p >= Rational(1, 2))
            v.verdict = InteriorVerdict::V::NonEmptyByTheorem;
        else if (*det_exact < Rational(1, 2))
            v.verdict = InteriorVerdict::V::EmptyNullSet;
        else
            v.verdict = InteriorVerdict::V::Unknown;
    } else {
        if (std::pow(det_abs, d) >= 0.5)
            v.verdict = InteriorVerdict::V::NonEmptyByTheorem;
        else if (det_abs < 0.5)
            v.verdict = InteriorVerdict::V::EmptyNullSet;
        else
            v.verdict = InteriorVerdict::V::Unknown;
    }
    return v;
}

std::pair<double, std::optional<Rational>> spec_det(const SpectralSpec& spec) {
    Rational det(1);
    double detd = 1;
    for (const auto& b : spec.blocks) {
        det *= pow_rational(b.modulus_exact, b.dim());
        detd *= std::pow(b.modulus, b.dim());
    }
    if (spec.provenance == SpectralSpec::Provenance::Exact)
        return {to_double(det), det};
    return {detd, std::nullopt};
}

std::pair<double, std::optional<Rational>> raw_det(const RawSystem& sys) {
    if (sys.exact) {
        Rational det = abs_rational(determinant(sys.M_exact));
        return {to_double(det), det};
    }
    return {std::fabs(determinant(sys.M)), std::nullopt};
}

Connectivity connectivity_from_det(double det_abs, const std::optional<Rational>& det_exact) {
    bool connected = det_exact ? *det_exact >= Rational(1, 2) : det_abs >= 0.5;
    return connected ? Connectivity::PathConnected : Connectivity::Unknown;
}

}  // namespace

InteriorVerdict interior_verdict(const SpectralSpec& spec) {
    auto [detd, det] = spec_det(spec);
    return verdict_from_det(spec.dimension(), detd, det);
}

InteriorVerdict interior_verdict(const RawSystem& sys) {
    auto [detd, det] = raw_det(sys);
    return verdict_from_det(sys.d, detd, det);
}

Connectivity connectivity_verdict(const SpectralSpec& spec) {
    auto [detd, det] = spec_det(spec);
    return connectivity_from_det(detd, det);
}

Connectivity connectivity_verdict(const RawSystem& sys) {
    auto [detd, det] = raw_det(sys);
    return connectivity_from_det(detd, det);
}

}  // namespace selfaffine
