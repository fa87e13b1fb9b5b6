#include <doctest.h>

#include <string>

#include "selfaffine/classifier.hpp"

using namespace selfaffine;

namespace {

UniquenessClass classify_text(const std::string& text) {
    auto spec = parse_spec(text).spec();
    validate_spec(spec);
    return classify_uniqueness(spec);
}

}  // namespace

TEST_SUITE("classifier") {

TEST_CASE("validate_spec rejects repeated eigenvalues across blocks") {
    // Two identical real blocks: no cyclic vector can exist.
    auto bad = parse_spec("block real modulus=1/2\nblock real modulus=1/2\n").spec();
    CHECK_THROWS_AS(validate_spec(bad), std::invalid_argument);
    // Opposite signs are distinct eigenvalues and fine.
    auto ok = parse_spec("block real modulus=-9/10\nblock real modulus=9/10\n").spec();
    CHECK_NOTHROW(validate_spec(ok));
    // Identical rotation blocks repeat a complex pair.
    auto rot = parse_spec(
                   "block rotation modulus=1/2 angle=1/4pi\n"
                   "block rotation modulus=1/2 angle=1/4pi\n")
                   .spec();
    CHECK_THROWS_AS(validate_spec(rot), std::invalid_argument);
}

TEST_CASE("jordan blocks imply positive dimension") {
    auto c = classify_text("block jordan modulus=1/2 size=2\n");
    CHECK(c.verdict == UniquenessVerdict::PositiveHausdorffDim);
    CHECK(c.rule == ClassifierRule::Jordan);
    CHECK(c.confidence == Confidence::Exact);
}

TEST_CASE("irrational rotation angles imply positive dimension") {
    auto c = classify_text("block rotation modulus=9/10 angle=irrational:1.0\n");
    CHECK(c.verdict == UniquenessVerdict::PositiveHausdorffDim);
    CHECK(c.rule == ClassifierRule::IrrationalAngle);
}

TEST_CASE("distinct moduli imply positive dimension") {
    auto c = classify_text("block real modulus=3/5\nblock real modulus=4/5\n");
    CHECK(c.verdict == UniquenessVerdict::PositiveHausdorffDim);
    CHECK(c.rule == ClassifierRule::DistinctModuli);
}

TEST_CASE("opposite real pair at modulus 9/10 lands in the finite bucket") {
    auto c = classify_text("block real modulus=-9/10\nblock real modulus=9/10\n");
    CHECK(c.verdict == UniquenessVerdict::FiniteNonEmpty);
    CHECK(c.rule == ClassifierRule::RationalEqualModuli);
    CHECK(c.q == 1);
    CHECK(c.sign_conflict);
    REQUIRE(c.beta_exact.has_value());
    CHECK(*c.beta_exact == Rational(100, 81));
    CHECK(c.block_signs == std::vector<int>{-1, 1});
}

TEST_CASE("opposite real pair at modulus 7/10 exceeds the uniqueness threshold") {
    auto c = classify_text("block real modulus=-7/10\nblock real modulus=7/10\n");
    CHECK(c.verdict == UniquenessVerdict::PositiveHausdorffDim);
    CHECK(c.sign_conflict);
    REQUIRE(c.beta_exact.has_value());
    CHECK(*c.beta_exact == Rational(100, 49));
}

TEST_CASE("opposite real pair at modulus 3/4 sits between the two constants") {
    auto c = classify_text("block real modulus=-3/4\nblock real modulus=3/4\n");
    CHECK(c.verdict == UniquenessVerdict::InfiniteCountable);
    REQUIRE(c.beta_exact.has_value());
    CHECK(*c.beta_exact == Rational(16, 9));
    CHECK(c.golden_used.has_value());
    CHECK(c.komornik_loreti_used.has_value());
}

TEST_CASE("single rotation at angle pi/2") {
    auto c = classify_text("block rotation modulus=19/20 angle=1/2pi\n");
    CHECK(c.verdict == UniquenessVerdict::FiniteNonEmpty);
    CHECK(c.q == 2);
    CHECK_FALSE(c.sign_conflict);  // one block cannot conflict with itself
    REQUIRE(c.beta_exact.has_value());
    CHECK(*c.beta_exact == Rational(400, 361));
}

TEST_CASE("rotation pair with angles pi/2 and pi/3 conflicts at q = 6") {
    auto c = classify_text(
        "block rotation modulus=19/20 angle=1/2pi\n"
        "block rotation modulus=19/20 angle=1/3pi\n");
    CHECK(c.q == 6);
    CHECK(c.sign_conflict);
    CHECK(c.block_signs == std::vector<int>{-1, 1});
    REQUIRE(c.beta_exact.has_value());
    // beta = (20/19)^12
    CHECK(*c.beta_exact == pow_rational(Rational(20, 19), 12));
    CHECK(c.verdict == UniquenessVerdict::PositiveHausdorffDim);
    CHECK(c.beta == doctest::Approx(1.8506178062217096).epsilon(1e-12));
}

TEST_CASE("single rotation at angle pi/4") {
    auto c = classify_text("block rotation modulus=9/10 angle=1/4pi\n");
    CHECK(c.q == 4);
    CHECK_FALSE(c.sign_conflict);
    REQUIRE(c.beta_exact.has_value());
    CHECK(*c.beta_exact == Rational(10000, 6561));  // (10/9)^4 < G
    CHECK(c.verdict == UniquenessVerdict::FiniteNonEmpty);
}

TEST_CASE("single rotation at angle 2pi/3 with even power sign") {
    auto c = classify_text("block rotation modulus=4/5 angle=2/3pi\n");
    CHECK(c.q == 3);
    // kappa^3 = m^3 e^{i 2 pi} = +m^3
    CHECK(c.block_signs == std::vector<int>{1});
    CHECK_FALSE(c.sign_conflict);
    REQUIRE(c.beta_exact.has_value());
    CHECK(*c.beta_exact == Rational(125, 64));  // (5/4)^3 > beta*
    CHECK(c.verdict == UniquenessVerdict::PositiveHausdorffDim);
}

TEST_CASE("one-dimensional real systems bucket by 1/lambda") {
    auto finite = classify_text("block real modulus=4/5\n");
    CHECK(finite.verdict == UniquenessVerdict::FiniteNonEmpty);  // beta = 5/4
    CHECK(*finite.beta_exact == Rational(5, 4));

    auto infinite = classify_text("block real modulus=3/5\n");
    CHECK(infinite.verdict == UniquenessVerdict::InfiniteCountable);  // 5/3 in (G, beta*)

    auto positive = classify_text("block real modulus=11/20\n");
    CHECK(positive.verdict == UniquenessVerdict::PositiveHausdorffDim);  // 20/11 > beta*
    CHECK(*positive.beta_exact == Rational(20, 11));

    auto low = classify_text("block real modulus=2/5\n");
    CHECK(low.verdict == UniquenessVerdict::PositiveHausdorffDim);  // 5/2 > beta*
}

TEST_CASE("negative single block has no partner to conflict with") {
    auto c = classify_text("block real modulus=-4/5\n");
    CHECK(c.q == 1);
    CHECK(c.block_signs == std::vector<int>{-1});
    CHECK_FALSE(c.sign_conflict);
    CHECK(*c.beta_exact == Rational(5, 4));
    CHECK(c.verdict == UniquenessVerdict::FiniteNonEmpty);
}

TEST_CASE("classification refuses to separate beta from the uncertain constant") {
    // modulus chosen so beta = 1/m equals an 18-digit rational inside every
    // double-certifiable bracket of the constant
    auto spec = parse_spec("block real modulus=1000000000000000000/1787231650182965933\n").spec();
    CHECK_THROWS_AS(classify_uniqueness(spec), PrecisionExhausted);
}

TEST_CASE("interior verdicts follow the determinant thresholds in dimension 2") {
    // |det| = 17/20 = 0.85 >= 2^(-1/2): interior guaranteed
    auto hi = parse_spec("block real modulus=9/10\nblock real modulus=17/18\n").spec();
    auto vh = interior_verdict(hi);
    CHECK(vh.verdict == InteriorVerdict::V::NonEmptyByTheorem);
    CHECK(vh.det_abs_exact.has_value());
    CHECK(*vh.det_abs_exact == Rational(17, 20));
    CHECK(vh.d == 2);
    CHECK(vh.threshold_hi == doctest::Approx(0.7071067811865476));

    // |det| = 3/5 in [1/2, 2^(-1/2)): theorem silent
    auto mid = parse_spec("block real modulus=3/4\nblock real modulus=4/5\n").spec();
    CHECK(interior_verdict(mid).verdict == InteriorVerdict::V::Unknown);

    // |det| = 2/5 < 1/2: null set
    auto lo = parse_spec("block real modulus=1/2\nblock real modulus=4/5\n").spec();
    CHECK(interior_verdict(lo).verdict == InteriorVerdict::V::EmptyNullSet);
}

TEST_CASE("interior threshold is exact at |det|^d = 1/2") {
    // d = 2, |det| = 5/8 * 4/5 = 1/2: (1/2)^2 = 1/4 < 1/2 -> not NonEmpty,
    // but exactly at the connectivity boundary.
    auto at_half = parse_spec("block real modulus=5/8\nblock real modulus=4/5\n").spec();
    CHECK(interior_verdict(at_half).verdict == InteriorVerdict::V::Unknown);
    CHECK(connectivity_verdict(at_half) == Connectivity::PathConnected);

    // Nudge below 1/2: 0.499... loses the connectivity guarantee.
    auto below = parse_spec("block real modulus=5/8\nblock real modulus=799/1000\n").spec();
    CHECK(connectivity_verdict(below) == Connectivity::Unknown);

    // In d = 2 NonEmptyByTheorem needs |det| >= 2^(-1/2), irrational, so a
    // rational determinant can only sit strictly on either side; 0.7071 vs
    // 0.7072 straddle it.
    auto under = parse_spec("block real modulus=7071/10000\nblock real modulus=999/1000\n").spec();
    CHECK(interior_verdict(under).verdict == InteriorVerdict::V::Unknown);
    auto over = parse_spec("block real modulus=8/10\nblock real modulus=9/10\n").spec();
    // 0.72 >= 2^(-1/2) is false (0.7071...); 0.72 > 0.70710678... -> NonEmpty
    CHECK(interior_verdict(over).verdict == InteriorVerdict::V::NonEmptyByTheorem);
}

TEST_CASE("one-dimensional interior thresholds") {
    auto strong = parse_spec("block real modulus=4/5\n").spec();
    CHECK(interior_verdict(strong).verdict == InteriorVerdict::V::NonEmptyByTheorem);
    CHECK(connectivity_verdict(strong) == Connectivity::PathConnected);
    auto half = parse_spec("block real modulus=1/2\n").spec();
    CHECK(interior_verdict(half).verdict == InteriorVerdict::V::NonEmptyByTheorem);
    CHECK(connectivity_verdict(half) == Connectivity::PathConnected);
    auto weak = parse_spec("block real modulus=2/5\n").spec();
    CHECK(interior_verdict(weak).verdict == InteriorVerdict::V::EmptyNullSet);
    CHECK(connectivity_verdict(weak) == Connectivity::Unknown);
}

TEST_CASE("matrix-mode verdicts use the exact determinant") {
    auto sys = parse_spec(
                   "matrix d=2\n"
                   "row 9/10 1/8\n"
                   "row 0 17/18\n"
                   "u 1 1\n"
                   "mode exact\n")
                   .raw();
    auto v = interior_verdict(sys);
    CHECK(v.verdict == InteriorVerdict::V::NonEmptyByTheorem);
    REQUIRE(v.det_abs_exact.has_value());
    CHECK(*v.det_abs_exact == Rational(17, 20));
    CHECK(connectivity_verdict(sys) == Connectivity::PathConnected);
}

TEST_CASE("nonempty-by-theorem always implies path-connected") {
    const char* texts[] = {
        "block real modulus=9/10\nblock real modulus=17/18\n",
        "block real modulus=4/5\n",
        "block rotation modulus=19/20 angle=1/2pi\n",
        "block real modulus=-9/10\nblock real modulus=9/10\n",
    };
    for (const char* text : texts) {
        auto spec = parse_spec(text).spec();
        if (interior_verdict(spec).verdict == InteriorVerdict::V::NonEmptyByTheorem)
            CHECK(connectivity_verdict(spec) == Connectivity::PathConnected);
    }
}

}  // TEST_SUITE
