#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "randlab/errors.hpp"
#include "randlab/markov.hpp"

#include <algorithm>

using namespace randlab;

namespace {

StagedCover single_stage(std::vector<RationalInterval> intervals) {
    StagedCover c;
    c.stages.push_back(std::move(intervals));
    c.size_bound = {0};
    return c;
}

}  // namespace

TEST_CASE("polygonal functions interpolate exactly") {
    PolygonalFunction p({{Rational(0), Rational(0)}, {Rational(1, 4), Rational(1, 8)}, {Rational(1), Rational(1)}});
    CHECK(p.value(Rational(1, 8)) == Rational(1, 16));
    CHECK(p.value(Rational(5, 8)) == Rational(9, 16));
    CHECK(p.lipschitz_constant() == Rational(7, 6));
    CHECK(p.is_nondecreasing());
    CHECK_THROWS_AS(PolygonalFunction({{Rational(0), Rational(0)}, {Rational(1, 2), Rational(1)}}), Error);
    CHECK_THROWS_AS(
        PolygonalFunction({{Rational(0), Rational(0)}, {Rational(0), Rational(1)}, {Rational(1), Rational(1)}}), Error);
}

TEST_CASE("symbolic rules and clamping") {
    CHECK(MarkovFunction::square()(Rational(1, 3)) == Rational(1, 9));
    CHECK(MarkovFunction::square()(Rational(2)) == Rational(1));
    CHECK(MarkovFunction::abs_offset(Rational(1, 2))(Rational(1, 8)) == Rational(3, 8));
    CHECK(MarkovFunction::half()(Rational(3, 4)) == Rational(3, 8));
    CHECK(MarkovFunction::complement()(Rational(1, 4)) == Rational(3, 4));
    CHECK(MarkovFunction::constant(Rational(2, 5))(Rational(-7)) == Rational(2, 5));
    CHECK(MarkovFunction::from_name("abs_offset(1/2)")(Rational(1)) == Rational(1, 2));
    CHECK(MarkovFunction::from_name("const(1/3)")(Rational(0)) == Rational(1, 3));
    CHECK_THROWS_AS(MarkovFunction::from_name("cube"), Error);
    CHECK(MarkovFunction::square().modulus().has_value());
    CHECK_FALSE(canonical_nonuc(3).modulus().has_value());
    CHECK(to_string(MarkovFunction::square().kind()) == "SYMBOLIC");
}

TEST_CASE("hulls include interior critical points") {
    const auto [lo, hi] = MarkovFunction::square().hull(Rational(1, 4), Rational(1, 2));
    CHECK(lo == Rational(1, 16));
    CHECK(hi == Rational(1, 4));
    const auto [alo, ahi] = MarkovFunction::abs_offset(Rational(1, 2)).hull(Rational(1, 4), Rational(5, 8));
    CHECK(alo == Rational(0));
    CHECK(ahi == Rational(1, 4));
    const auto [clo, chi] = canonical_nonuc(4).hull(Rational(1, 2), Rational(3, 4));
    CHECK(clo == Rational(0));
    CHECK(chi == Rational(1));
}

TEST_CASE("canonical non-uniformly-continuous function") {
    const auto f = canonical_nonuc(20);
    for (long n = 0; n < 20; ++n) {
        const auto iv = canonical_interval(n);
        CHECK(f((iv.lo() + iv.hi()) / Rational(2)) == Rational(n));
        CHECK(f(iv.lo()) == Rational(0));
        CHECK(f(iv.hi()) == Rational(0));
    }
    CHECK(f(Rational(1)) == Rational(0));
    CHECK(canonical_interval(2).to_string() == "[3/4,7/8]");
    // Quarter point of I_3 = [7/8, 15/16]: half the tent height.
    CHECK(f(Rational(57, 64)) == Rational(3, 2));
}

TEST_CASE("oscillation tree of the identity") {
    const auto tree = oscillation_tree(MarkovFunction::identity(), 3, 5);
    const std::vector<BitString> expected{"", "0", "1", "00", "01", "10", "11"};
    CHECK(tree == expected);
    CHECK(oscillation_tree(MarkovFunction::constant(Rational(1, 2)), 0, 6).empty());
    CHECK_THROWS_AS(oscillation_tree(MarkovFunction::identity(), 3, 17), Error);
}

TEST_CASE("oscillation tree of the non-uc function keeps the branch at 1") {
    const auto tree = oscillation_tree(canonical_nonuc(20), 0, 8);
    REQUIRE_FALSE(tree.empty());
    CHECK(std::find(tree.begin(), tree.end(), BitString(8, '1')) != tree.end());
    for (const auto& s : tree) {
        if (s.empty()) continue;
        CHECK(std::find(tree.begin(), tree.end(), s.substr(0, s.size() - 1)) != tree.end());
    }
}

TEST_CASE("condition H detects overlap and late long intervals") {
    auto ok = single_stage({RationalInterval::closed(Rational(0), Rational(1, 2))});
    CHECK(check_H(ok).ok);

    auto overlap = single_stage({RationalInterval::closed(Rational(0), Rational(1, 2)),
                                 RationalInterval::closed(Rational(1, 4), Rational(3, 4))});
    const auto r = check_H(overlap);
    CHECK_FALSE(r.ok);
    CHECK(r.violation == CoverCheck::Violation::Overlap);

    StagedCover late;
    late.stages = {{RationalInterval::closed(Rational(0), Rational(1, 8))},
                   {RationalInterval::closed(Rational(1, 2), Rational(3, 4))}};
    late.size_bound = {0, 0, 0};
    const auto s = check_H(late);
    CHECK_FALSE(s.ok);
    CHECK(s.violation == CoverCheck::Violation::Size);
    CHECK(s.k == 2);
    CHECK(s.stage == 1);
}

TEST_CASE("truncation is linear across the cover") {
    const auto f = MarkovFunction::square();
    const auto t = truncate(f, single_stage({RationalInterval::closed(Rational(0), Rational(1, 2))}));
    CHECK(t(Rational(1, 4)) == Rational(1, 8));
    CHECK(t(Rational(1, 2)) == Rational(1, 4));
    CHECK(t.name() == "[square,C]");
    for (long j = 513; j <= 1024; ++j) {
        const Rational x(j, 1024);
        CHECK(t(x) == x * x);
    }
    auto bad = single_stage({RationalInterval::closed(Rational(0), Rational(1, 2)),
                             RationalInterval::closed(Rational(1, 4), Rational(3, 4))});
    CHECK_THROWS_AS(truncate(f, bad), Error);
}

TEST_CASE("slope bounds clauses") {
    const auto f = MarkovFunction::square();
    const auto c = single_stage({RationalInterval::closed(Rational(0), Rational(1, 2))});
    const auto pass = slope_bounds_check(f, c, Rational(1, 4), Rational(2), 10);
    CHECK(pass.pass);
    CHECK(pass.grid_pairs_checked == 1024);

    const auto ii = slope_bounds_check(f, c, Rational(1, 2), Rational(2), 10);
    CHECK_FALSE(ii.pass);
    CHECK_FALSE(ii.clause_ii);
    CHECK(ii.evidence.size() == 4);

    const auto iii = slope_bounds_check(f, c, Rational(1, 4), Rational(1), 4);
    CHECK_FALSE(iii.pass);
    CHECK_FALSE(iii.clause_iii);
    // First adjacent pair past 1/2 with x + y >= 1.
    CHECK(iii.evidence[0] == Rational(1, 2));
    CHECK(iii.evidence[1] == Rational(9, 16));
    CHECK_THROWS_AS(slope_bounds_check(f, c, Rational(2), Rational(1), 4), Error);
}

TEST_CASE("extension values") {
    const auto sq = eval_extension(MarkovFunction::square(), newton_sqrt2(), 6);
    CHECK(sq.certified);
    CHECK(sq.value.contains(Rational(1)));

    const auto third = eval_extension(MarkovFunction::square(), scripted_name({Rational(1, 3)}, 0), 10);
    CHECK(third.certified);
    CHECK(third.value.contains(Rational(1, 9)));
    CHECK(third.value.length() <= Rational::pow2(-8));

    const auto nonuc = canonical_nonuc(20);
    const auto at_half = eval_extension(nonuc, const_name(Rational(1, 2)), 4);
    CHECK_FALSE(at_half.certified);
    CHECK(at_half.value.is_point());
    CHECK_THROWS_AS(eval_extension(nonuc, scripted_name({Rational(1)}, 0), 4), Error);
    CHECK_THROWS_AS(eval_extension(nonuc, scripted_name({Rational(1)}, 0), 8), Error);
    CHECK_THROWS_AS(eval_extension(nonuc, const_name(Rational(1, 2)), 21), Error);
}
