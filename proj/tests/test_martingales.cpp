#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "randlab/errors.hpp"
#include "randlab/martingale.hpp"

using namespace randlab;

namespace {

std::vector<Rational> R(std::initializer_list<long> v) {
    std::vector<Rational> out;
    for (long x : v) out.emplace_back(x);
    return out;
}

}  // namespace

TEST_CASE("fairness of the built-in rules") {
    CHECK(check_fairness(Martingale::constant(Rational(1), 12), 12).pass());
    CHECK(check_fairness(Martingale::all_in_on_0(12), 12).pass());
    CHECK(check_fairness(Martingale::split_bet(Rational(1, 3), 12), 12).pass());
    CHECK(check_level_sums(Martingale::split_bet(Rational(1, 3), 12), 12).pass());
    CHECK(Martingale::split_bet(Rational(1, 3), 2).value("01") == Rational(8, 9));
    CHECK_THROWS_AS(Martingale::all_in_on_0(17), Error);
}

TEST_CASE("unfair table is reported at the empty string") {
    const auto m = Martingale::from_table({{"", Rational(1)}, {"0", Rational(2)}, {"1", Rational(1)}}, "unfair");
    const auto r = check_fairness(m, 1);
    REQUIRE_FALSE(r.pass());
    CHECK(r.first_failure()->detail == "2M(\"\") = 2/1 != 3/1");
    CHECK_FALSE(check_level_sums(m, 1).pass());
    CHECK_THROWS_AS(Martingale::from_table({{"", Rational(1)}, {"0", Rational(2)}}, "partial"), Error);
}

TEST_CASE("capital traces") {
    const auto m = Martingale::all_in_on_0(4);
    CHECK(capital_trace(m, "00").capital == R({1, 2, 4}));
    CHECK(capital_trace(m, "01").capital == R({1, 2, 0}));
    CHECK(capital_trace(m, "01").running_max == R({1, 2, 2}));
    CHECK(capital_trace(Martingale::constant(Rational(1), 4), "1011").capital == R({1, 1, 1, 1, 1}));
    CHECK_THROWS_AS(capital_trace(m, "00000"), Error);
}

TEST_CASE("savings violation scan on the doubling strategy") {
    const auto v = find_savings_violation(Martingale::all_in_on_0(6), 6);
    REQUIRE(v.has_value());
    CHECK(v->sigma == "00");
    CHECK(v->tau == "001");
    CHECK(v->drop == Rational(4));
    CHECK_FALSE(find_savings_violation(Martingale::constant(Rational(1), 6), 6).has_value());
}

TEST_CASE("savings transform of the doubling strategy") {
    const auto s = savings_transform(Martingale::all_in_on_0(12), 12);
    const auto& m = s.transformed;
    CHECK(check_fairness(m, 12).pass());
    CHECK(check_level_sums(m, 12).pass());
    CHECK(check_nonnegative(m, 12).pass());
    CHECK_FALSE(find_savings_violation(m, 12).has_value());
    CHECK(capital_trace(m, "0000").capital == R({1, 2, 3, 4, 5}));
    CHECK(m.value("01") == Rational(1));
    CHECK(s.growth_factor == Rational(1));
    CHECK(s.growth_constant == Rational(-1));
    CHECK(s.bank_events == 12);
}

TEST_CASE("savings transform fixes the constant martingale") {
    const auto c = Martingale::constant(Rational(1), 8);
    const auto s = savings_transform(c, 8);
    CHECK(s.transformed.levels() == c.levels());
    CHECK(s.bank_events == 0);
}

TEST_CASE("savings transform of a biased strategy") {
    const auto s = savings_transform(Martingale::split_bet(Rational(1, 5), 12), 12);
    CHECK(check_fairness(s.transformed, 12).pass());
    CHECK_FALSE(find_savings_violation(s.transformed, 12).has_value());
    CHECK_THROWS_AS(savings_transform(Martingale::from_table({{"", Rational(1)}, {"0", Rational(2)}, {"1", Rational(1)}}, "u"), 1),
                    Error);
}

TEST_CASE("rule names") {
    CHECK(Martingale::from_rule("split_bet(1/4)", 3).value("111") == Rational(27, 8));
    CHECK(Martingale::from_rule("constant", 3).name() == "constant");
    CHECK_THROWS_AS(Martingale::from_rule("martingale", 3), Error);
}
