#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "randlab/derivatives.hpp"
#include "randlab/errors.hpp"

using namespace randlab;

TEST_CASE("slopes are exact difference quotients") {
    const auto sq = MarkovFunction::square();
    CHECK(slope(sq, Rational(1, 4), Rational(1, 2)) == Rational(3, 4));
    CHECK(slope(sq, Rational(1, 2), Rational(1, 4)) == Rational(3, 4));
    CHECK_THROWS_AS(slope(sq, Rational(1, 3), Rational(1, 3)), Error);
}

TEST_CASE("square at one third") {
    const auto e = pseudo_derivative(MarkovFunction::square(), const_name(Rational(1, 3)), Rational::pow2(-10), 14);
    REQUIRE(e.has_samples);
    // Frozen extremes: a + b for the widest grid pairs around 1/3.
    CHECK(e.upper == Rational(5469, 8192));
    CHECK(e.lower == Rational(2727, 4096));
    CHECK(abs(e.upper - Rational(2, 3)) <= Rational::pow2(-6));
    CHECK(abs(e.lower - Rational(2, 3)) <= Rational::pow2(-6));
    CHECK(classify_denjoy(e, Rational::pow2(-4)) == DenjoyVerdict::Differentiable);
}

TEST_CASE("identity slopes are exactly one") {
    const auto e = pseudo_derivative(MarkovFunction::identity(), scripted_name({Rational(1, 3)}, 0), Rational::pow2(-6), 10);
    CHECK(e.upper == Rational(1));
    CHECK(e.lower == Rational(1));
    CHECK(classify_denjoy(e, Rational(0)) == DenjoyVerdict::Differentiable);
}

TEST_CASE("a corner is neither") {
    const auto e = pseudo_derivative(MarkovFunction::abs_offset(Rational(1, 2)), const_name(Rational(1, 2)),
                                     Rational::pow2(-8), 12);
    CHECK(e.upper == Rational(1));
    CHECK(e.lower == Rational(-1));
    CHECK(e.stable_under_halving);
    CHECK(classify_denjoy(e, Rational::pow2(-4)) == DenjoyVerdict::Neither);
    CHECK(to_string(DenjoyVerdict::Neither) == "NEITHER");
}

TEST_CASE("steep tents flag infinite slopes") {
    // I_11 has length 2^-12 and height 11: rising slope 11 * 2^13 > 2^16.
    const auto f = canonical_nonuc(20);
    const auto iv = canonical_interval(11);
    const auto e = pseudo_derivative(f, const_name(iv.lo()), Rational::pow2(-13), 14);
    REQUIRE(e.has_samples);
    CHECK(e.upper_infinite);
    CHECK_FALSE(e.lower_infinite);
    CHECK(classify_denjoy(e, Rational(1)) == DenjoyVerdict::Neither);
}

TEST_CASE("budgets are enforced") {
    CHECK_THROWS_AS(pseudo_derivative(MarkovFunction::square(), const_name(Rational(1, 3)), Rational::pow2(-4), 15),
                    Error);
    CHECK_THROWS_AS(pseudo_derivative(MarkovFunction::square(), const_name(Rational(1, 3)), Rational::pow2(-20), 10),
                    Error);
}

TEST_CASE("no grid pairs means unresolved") {
    PseudoDerivativeEstimate empty;
    CHECK(classify_denjoy(empty, Rational(1)) == DenjoyVerdict::Unresolved);
}
