#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "randlab/errors.hpp"
#include "randlab/randomness.hpp"

#include <climits>

using namespace randlab;

namespace {

IntervalUnion U(std::initializer_list<const char*> parts) {
    std::vector<RationalInterval> v;
    for (const char* p : parts) v.push_back(RationalInterval::parse(p));
    return normalize_union(v);
}

TestFamily prefix_family(TestKind kind, long first, long last) {
    TestFamily t;
    t.kind = kind;
    for (long m = first; m <= last; ++m) {
        t.components[m] = {normalize_union(std::vector{RationalInterval::open(Rational(0), Rational::pow2(-m))})};
        t.declared_measures[m] = Rational::pow2(-m);
    }
    return t;
}

ErrorKind kind_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::InvalidArgument;
}

std::vector<Rational> half_minus_pow2(long depth) {
    std::vector<Rational> q;
    for (long n = 0; n <= depth; ++n) q.push_back(Rational(1, 2) - Rational::pow2(-n));
    return q;
}

std::vector<std::set<long>> initial_segments(long count) {
    std::vector<std::set<long>> c;
    for (long m = 0; m < count; ++m) {
        std::set<long> s;
        for (long n = 0; n <= m; ++n) s.insert(n);
        c.push_back(s);
    }
    return c;
}

}  // namespace

TEST_CASE("kind tags round-trip") {
    CHECK(parse_test_kind("WEAK_DEMUTH") == TestKind::WeakDemuth);
    CHECK(to_string(TestKind::IntervalSequence) == "INTERVAL_SEQUENCE");
    CHECK(kind_of([] { parse_test_kind("ml"); }) == ErrorKind::ParseError);
}

TEST_CASE("ML measure bounds") {
    auto t = prefix_family(TestKind::ML, 1, 8);
    CHECK(validate(t).pass());
    t.components[2] = {U({"(0,1/2)"})};
    const auto r = validate(t);
    REQUIRE_FALSE(r.pass());
    CHECK(r.first_failure()->name == "measure_bound[m=2,version=0]");
    CHECK(r.first_failure()->values[0].second == "1/2");
    CHECK(r.first_failure()->values[1].second == "1/4");
}

TEST_CASE("Schnorr declared measure must match") {
    auto t = prefix_family(TestKind::Schnorr, 1, 4);
    CHECK(validate(t).pass());
    t.declared_measures[2] = Rational(1, 3);
    const auto report = validate(t);
    const auto* bad = report.first_failure();
    REQUIRE(bad);
    CHECK(bad->name == "declared_measure[m=2]");
    CHECK(bad->detail == "declared 1/3 != actual 1/4");
    // The same family is still an ML test.
    CHECK(validate_as(t, TestKind::ML).pass());
}

TEST_CASE("Solovay running sums") {
    auto t = prefix_family(TestKind::Solovay, 0, 8);
    t.solovay_bound = Rational(2);
    CHECK(validate(t).pass());
    t.solovay_bound = Rational(3, 2);
    const auto report = validate(t);
    const auto* bad = report.first_failure();
    REQUIRE(bad);
    CHECK(bad->name == "solovay_running_sum[m=2]");
}

TEST_CASE("evaluation verdicts") {
    const auto t = prefix_family(TestKind::ML, 1, 8);
    const auto out = evaluate(t, const_name(Rational(3, 4)), 8);
    REQUIRE(out.components.size() == 8);
    CHECK(out.components[0].result == VerdictResult::Escaped);
    CHECK(out.summary.status == "ESCAPES_A_COMPONENT");

    const auto fuzzy = evaluate(t, scripted_name({Rational(0)}, 0), 3);
    CHECK(fuzzy.components[0].result == VerdictResult::UndecidedAtDepth);
    CHECK(fuzzy.components[0].precision == 64);
    CHECK(fuzzy.summary.status == "UNDECIDED_AT_DEPTH");

    const auto inside = evaluate(t, const_name(Rational(1, 1024)), 8);
    CHECK(inside.summary.status == "IN_ALL_COMPONENTS_TO_DEPTH");
    CHECK(inside.summary.hits == 8);
    CHECK(inside.components[7].witness->to_string() == "(0/1,1/256)");

    CHECK(kind_of([&] { evaluate(t, const_name(Rational(0)), 9); }) == ErrorKind::BudgetExceeded);
}

TEST_CASE("Pi1 construction for q_n = 1/2 - 2^-n") {
    const auto q = half_minus_pow2(64);
    const auto c = initial_segments(8);
    CHECK(pi1_residual_measure(q, c[3], 64) == Rational::pow2(-4) - Rational::pow2(-64));
    const auto t = build_pi1_ml_test(q, c, 64);
    CHECK(t.max_index() == 6);
    for (long m = 0; m <= 6; ++m) CHECK(t.final_component(m).measure() <= Rational::pow2(-m));
    // B_0 = [0,1/8) u (1/8, 5/8 - 2^-64).
    CHECK(t.final_component(0).measure() == Rational(5, 8) - Rational::pow2(-64));
    CHECK(t.final_component(0).parts().size() == 2);
    const auto e = evaluate(t, scripted_name({Rational(1, 2)}, 0), 6);
    for (const auto& v : e.components) CHECK(v.result == VerdictResult::Captured);
}

TEST_CASE("Pi1 invariant violations are rejected") {
    auto c = initial_segments(3);
    c[1].clear();
    CHECK(kind_of([&] { build_pi1_ml_test(half_minus_pow2(10), c, 10); }) == ErrorKind::InvariantViolation);
    CHECK(kind_of([&] { build_pi1_ml_test(half_minus_pow2(3), initial_segments(3), 10); }) ==
          ErrorKind::InvalidArgument);
}

TEST_CASE("hop sets") {
    const std::vector<Rational> q{Rational(1, 8), Rational(7, 8), Rational(1, 8), Rational(3, 16)};
    const auto c = build_hop_sets(q, {{"00", "11"}, {"0", "1"}}, 3);
    REQUIRE(c.size() == 2);
    CHECK(c[0] == std::set<long>{0, 1});  // 1/8 and 3/16 share the cylinder "00"
    CHECK(c[1].empty());                  // "0" and "1" are contiguous
    CHECK(kind_of([&] { build_hop_sets(q, {{"0", "01"}}, 3); }) == ErrorKind::NotPrefixFree);
}

TEST_CASE("Demuth updates obey budgets and measure bounds") {
    TestFamily t;
    t.kind = TestKind::Demuth;
    t.budgets = {{2, 4}, {3, 4}};
    for (const char* v : {"(0,1/4)", "(1/4,1/2)", "(1/2,3/4)", "(3/4,1)"}) t = demuth_update(t, 2, U({v}));
    CHECK(t.version_count(2) == 4);
    CHECK(t.final_component(2) == U({"(3/4,1)"}));
    CHECK(kind_of([&] { demuth_update(t, 2, U({"(0,1/8)"})); }) == ErrorKind::BudgetExceeded);
    CHECK(kind_of([&] { demuth_update(t, 3, U({"[0,1/4]"})); }) == ErrorKind::MeasureBoundViolation);
    CHECK(kind_of([&] { demuth_update(t, 5, U({"[0,1/64]"})); }) == ErrorKind::BudgetExceeded);
    CHECK(validate(t).pass());

    const auto replayed = replay_updates(t, {{3, U({"[0,1/8]"})}, {3, U({"[1/2,5/8]"})}});
    CHECK(replayed.version_count(3) == 2);
    const auto e = evaluate(replayed, const_name(Rational(9, 16)), 3);
    CHECK(e.summary.hits == 1);
    CHECK(e.summary.last_hit == 3);
}

TEST_CASE("weak Demuth passing witness") {
    TestFamily t;
    t.kind = TestKind::WeakDemuth;
    t.budgets = {{0, 1}, {1, 1}};
    t = demuth_update(t, 0, U({"[0,1]"}));
    t = demuth_update(t, 1, U({"(0,1/2)"}));
    const auto e = evaluate(t, const_name(Rational(3, 4)), 1);
    CHECK(e.summary.passing_witness == 1);
    CHECK(e.summary.status == "PASSING_WITNESS_FOUND");
}

TEST_CASE("interval-sequence tests and their Schnorr form") {
    TestFamily t;
    t.kind = TestKind::IntervalSequence;
    t.blocks = {{1, 1, {RationalInterval::parse("[0,1/8]"), RationalInterval::parse("[1/2,3/4]")}, {1}},
                {1, 2, {RationalInterval::parse("[1/4,5/16]")}, {}}};
    refresh_derived_components(t);
    CHECK(validate(t).pass());
    CHECK(interval_sequence_class(t, 1, 1) == U({"[0,1/8]"}));
    const auto s = interval_sequence_to_schnorr(t, LONG_MAX);
    CHECK(s.relativized);
    CHECK(s.declared_measures.at(1) == Rational(3, 16));
    CHECK(validate(s).pass());

    t.blocks[0].excised.clear();
    refresh_derived_components(t);
    const auto report = validate(t);
    const auto* bad = report.first_failure();
    REQUIRE(bad);
    CHECK(bad->name == "block_bound[m=1,r=1]");
    CHECK(kind_of([&] { interval_sequence_to_schnorr(t, LONG_MAX); }) == ErrorKind::InvariantViolation);
}

TEST_CASE("limit approximations become interval sequences") {
    LimitOracle<IntervalUnion> oracle({{1, {U({"(0,1/8)"}), U({"(1/4,1/2)"})}}, {2, {U({"(0,3/16)"})}}}, {{1, 1}, {2, 0}});
    const auto t = schnorr_to_interval_sequence(oracle, 4);
    CHECK(validate(t).pass());
    CHECK(t.final_component(1) == U({"(1/4,1/2)"}));
    CHECK(t.final_component(2) == U({"(0,3/16)"}));
    // (0,3/16) splits as (0,1/8) in r = 1 and [1/8,3/16) in r = 2.
    REQUIRE(t.blocks.size() == 3);
    CHECK(t.blocks[1].r == 1);
    CHECK(t.blocks[2].intervals[0].to_string() == "[1/8,3/16)");
    CHECK(t.blocks[0].excised == std::set<long>{0});

    LimitOracle<IntervalUnion> too_big({{1, {U({"(0,1/2)"})}}});
    CHECK(kind_of([&] { schnorr_to_interval_sequence(too_big, 3); }) == ErrorKind::InvariantViolation);
    CHECK(kind_of([&] {
              LimitOracle<IntervalUnion>({{1, {U({"(0,1/8)"}), U({"(0,1/16)"})}}}, {{1, 0}});
          }) == ErrorKind::BudgetExceeded);
}

TEST_CASE("Solovay to ML threshold conversion") {
    TestFamily t;
    t.kind = TestKind::Solovay;
    t.solovay_bound = Rational(2);
    for (long m = 0; m <= 8; ++m) {
        t.components[m] = {normalize_union(std::vector{RationalInterval::open(
            Rational(1, 2) - Rational::pow2(-m - 1), Rational(1, 2) + Rational::pow2(-m - 1))})};
    }
    CHECK(validate(t).pass());
    const auto ml = convert_solovay_to_ml(t, 8);
    CHECK(validate(ml).pass());
    CHECK(ml.final_component(0) == U({"(1/4,3/4)"}));
    CHECK(ml.final_component(1).measure() == Rational(1, 8));
    CHECK(ml.final_component(2).measure() == Rational(1, 128));
    CHECK(ml.final_component(3).empty());

    const auto hits = evaluate(t, const_name(Rational(1, 2)), 8);
    CHECK(hits.summary.hits == 9);
    CHECK(hits.summary.status == "HIT_COUNT_AT_DEPTH");
}
