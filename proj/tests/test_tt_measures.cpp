#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "randlab/errors.hpp"
#include "randlab/limit_oracle.hpp"
#include "randlab/martingale.hpp"
#include "randlab/tt_measures.hpp"

using namespace randlab;

TEST_CASE("named functionals") {
    const auto id = TTFunctional::identity(8);
    CHECK(id.apply("0110") == "0110");
    CHECK(TTFunctional::bit_flip(8).apply("0110") == "1001");
    CHECK(TTFunctional::pairwise_or(8).apply("0010011") == "011");
    CHECK(TTFunctional::pairwise_or(8).use(3) == 8);
    CHECK_THROWS_AS(TTFunctional::from_rule("majority", 4), Error);
}

TEST_CASE("table functionals index blocks MSB first") {
    const auto xor2 = TTFunctional::table({1, 2}, {"01", "0110"});
    CHECK(xor2.apply("11") == "10");
    CHECK(xor2.apply("10") == "11");
    CHECK_THROWS_AS(TTFunctional::table({1, 2}, {"01", "011"}), Error);
    CHECK_THROWS_AS(TTFunctional::table({2, 1}, {"0110", "01"}), Error);
}

TEST_CASE("induced measures by preimage count") {
    CHECK(induced_measure(TTFunctional::identity(8), "1") == Rational(1, 2));
    CHECK(induced_measure(TTFunctional::pairwise_or(8), "1") == Rational(3, 4));
    CHECK(induced_measure(TTFunctional::pairwise_or(8), "11") == Rational(9, 16));
    CHECK(induced_measure(TTFunctional::pairwise_or(8), "010") == Rational(3, 64));
    CHECK(induced_measure(TTFunctional::bit_flip(8), "") == Rational(1));
    CHECK_THROWS_AS(induced_measure(TTFunctional::pairwise_or(13), BitString(13, '1')), Error);
    CHECK_THROWS_AS(induced_measure(TTFunctional::identity(2), "000"), Error);
}

TEST_CASE("lambda_phi tables are additive") {
    for (const auto& phi : {TTFunctional::identity(8), TTFunctional::pairwise_or(8), TTFunctional::bit_flip(8)}) {
        const auto mu = CylinderMeasure::induced(phi, 8);
        CHECK(validate_measure(mu, 8).pass());
    }
}

TEST_CASE("measure validation reports the first failure") {
    CHECK(validate_measure(CylinderMeasure::bernoulli(Rational(3, 4)), 10).pass());
    const auto bad = CylinderMeasure::from_table({{"", Rational(1)}, {"0", Rational(1, 2)}, {"1", Rational(1, 3)}});
    const auto r = validate_measure(bad, 1);
    REQUIRE_FALSE(r.pass());
    CHECK(r.first_failure()->name == "additivity");
    CHECK(r.first_failure()->values[0].second == "");
    CHECK(CylinderMeasure::bernoulli(Rational(3, 4)).mass("101") == Rational(9, 64));
    CHECK_THROWS_AS(bad.mass("00"), Error);
}

TEST_CASE("distribution functions") {
    const auto u = CylinderMeasure::uniform();
    const auto b = CylinderMeasure::bernoulli(Rational(3, 4));
    CHECK(cdf(u, Rational(3, 8)) == Rational(3, 8));
    CHECK(cdf(b, Rational(1, 2)) == Rational(1, 4));
    CHECK(cdf(b, Rational(7, 8)) == Rational(37, 64));
    CHECK(cdf(b, Rational(0)) == Rational(0));
    CHECK(cdf(b, Rational(1)) == Rational(1));
    CHECK_THROWS_AS(cdf(b, Rational(1, 3)), Error);
    Rational prev(0);
    for (long j = 0; j <= 4096; ++j) {
        const Rational g = cdf(b, Rational(j, 4096));
        CHECK(prev <= g);
        prev = g;
    }
}

TEST_CASE("transport examples") {
    const auto u = CylinderMeasure::uniform();
    const auto t0 = transport(u, "0110");
    CHECK(t0.c_prefix == "0110");
    CHECK(t0.status == TransportStatus::Complete);

    const auto b = CylinderMeasure::bernoulli(Rational(3, 4));
    const auto t1 = transport(b, "111");
    CHECK(t1.c_prefix == "1");
    CHECK(t1.image == RationalInterval::half_open(Rational(37, 64), Rational(1)));
    CHECK(t1.status == TransportStatus::NeedMoreInput);
    CHECK(to_string(t1.status) == "NEED_MORE_INPUT");

    const auto t2 = transport(b, "00");
    CHECK(t2.c_prefix == "0000");
    CHECK(t2.image == RationalInterval::half_open(Rational(0), Rational(1, 16)));
    CHECK(t2.status == TransportStatus::Complete);
}

TEST_CASE("degenerate transports are refused") {
    const auto atom = CylinderMeasure::from_table({{"", Rational(1)},
                                                   {"0", Rational(1)}, {"1", Rational(0)},
                                                   {"00", Rational(1)}, {"01", Rational(0)}, {"10", Rational(0)}, {"11", Rational(0)},
                                                   {"000", Rational(1)}, {"001", Rational(0)}, {"010", Rational(0)}, {"011", Rational(0)},
                                                   {"100", Rational(0)}, {"101", Rational(0)}, {"110", Rational(0)}, {"111", Rational(0)}});
    try {
        transport(atom, "");
        FAIL("expected AtomSuspected");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::AtomSuspected);
    }
    try {
        transport(CylinderMeasure::bernoulli(Rational(1)), "0");
        FAIL("expected ZeroMassCylinder");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ZeroMassCylinder);
    }
}

TEST_CASE("transport order properties") {
    CHECK(transport_order_check(CylinderMeasure::uniform(), 8).pass());
    CHECK(transport_order_check(CylinderMeasure::bernoulli(Rational(3, 4)), 8).pass());
    CHECK(transport_order_check(CylinderMeasure::induced(TTFunctional::pairwise_or(8), 6), 6).pass());
}

TEST_CASE("pushforward bracketing") {
    const auto u = transport_pushforward_check(CylinderMeasure::uniform(), "1", 6);
    CHECK(u.sum == Rational(1, 2));
    CHECK(u.residual == Rational(0));
    CHECK(u.pass);
    const auto b = CylinderMeasure::bernoulli(Rational(3, 4));
    CHECK(transport_pushforward_check(b, "1", 8).pass);
    const auto b00 = transport_pushforward_check(b, "00", 10);
    CHECK(b00.pass);
    CHECK(b00.sum <= Rational(1, 4));
    CHECK(Rational(1, 4) <= b00.sum + b00.residual);
    CHECK_THROWS_AS(transport_pushforward_check(b, "00", 5), Error);
}

TEST_CASE("tt functionals from uniformly continuous functions") {
    const auto id = tt_from_ucf(MarkovFunction::identity(), 10);
    CHECK(id.use(0) == 2);
    const auto half = tt_from_ucf(MarkovFunction::half(), 10);
    const auto flip = tt_from_ucf(MarkovFunction::complement(), 10);
    for (unsigned long i = 0; i < (1UL << 12); i += 37) {
        const auto x = bits_of(i, 12);
        const auto ix = id.apply(x);
        CHECK(ix == x.substr(0, ix.size()));
        const auto hx = half.apply(x);
        CHECK(hx == ("0" + x).substr(0, hx.size()));
        const auto fx = flip.apply(x);
        for (std::size_t k = 0; k < fx.size(); ++k) CHECK(fx[k] != x[k]);
    }
    CHECK_THROWS_AS(tt_from_ucf(canonical_nonuc(3), 4), Error);
}

TEST_CASE("limit oracle bookkeeping") {
    LimitOracle<long> o({{1, {0, 1, 1, 0}}, {2, {5}}}, {{1, 2}});
    CHECK(o.changes(1) == 2);
    CHECK(o.stabilization_stage(1) == 3);
    CHECK(o.limit(1) == 0);
    CHECK(o.approx(1, 99) == 0);
    CHECK(o.changes(2) == 0);
    CHECK_FALSE(o.budget(2).has_value());
    CHECK_THROWS_AS(LimitOracle<long>({{1, {0, 1, 0}}}, {{1, 1}}), Error);
}
