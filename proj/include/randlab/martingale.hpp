#pragma once

#include "randlab/check.hpp"
#include "randlab/interval.hpp"
#include "randlab/rational.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace randlab {

/// A martingale materialized on every bit string of length <= depth.
class Martingale {
public:
    static constexpr long kMaxDepth = 16;

    /// Table rows: levels[n][i] is the value at the length-n string with binary value i.
    Martingale(std::vector<std::vector<Rational>> levels, std::string name);

    static Martingale constant(const Rational& c, long depth);
    static Martingale all_in_on_0(long depth);
    /// M(s0) = 2p M(s), M(s1) = 2(1-p) M(s); requires 0 <= p <= 1.
    static Martingale split_bet(const Rational& p, long depth);
    /// "constant", "all_in_on_0", "split_bet(p/q)". Throws Error(ParseError).
    static Martingale from_rule(std::string_view rule, long depth);
    /// Every string up to the table depth must be present. Throws Error(FixtureInvalid).
    static Martingale from_table(const std::map<BitString, Rational>& table, std::string name);

    long depth() const { return static_cast<long>(levels_.size()) - 1; }
    const std::string& name() const { return name_; }
    const Rational& initial_capital() const { return levels_[0][0]; }
    /// Throws Error(BudgetExceeded) beyond the materialized depth.
    const Rational& value(std::string_view sigma) const;
    const std::vector<std::vector<Rational>>& levels() const { return levels_; }

private:
    std::vector<std::vector<Rational>> levels_;
    std::string name_;
};

/// String of length n with binary value i.
BitString bits_of(unsigned long i, long n);

/// PASS, or a single FAIL record naming the first sigma (by length, then
/// lexicographically) with 2M(sigma) != M(sigma0) + M(sigma1). depth <= 16.
CheckReport check_fairness(const Martingale& m, long depth);

/// Sum over |sigma| = n of M(sigma) == 2^n M(empty) for n <= depth.
CheckReport check_level_sums(const Martingale& m, long depth);

/// All values non-negative up to depth.
CheckReport check_nonnegative(const Martingale& m, long depth);

struct CapitalTrace {
    std::vector<Rational> capital;      // M(prefix restricted to n), n = 0..|prefix|
    std::vector<Rational> running_max;  // max over k <= n
};

CapitalTrace capital_trace(const Martingale& m, std::string_view prefix);

struct SavingsViolation {
    BitString sigma;
    BitString tau;
    Rational drop;  // M(sigma) - M(tau) > 2
};

/// First pair sigma <= tau, |tau| <= depth, with M(tau) < M(sigma) - 2; sigma
/// scanned by length then lexicographically, tau likewise among its extensions.
std::optional<SavingsViolation> find_savings_violation(const Martingale& m, long depth);

struct SavingsResult {
    Martingale transformed;
    /// Achieved growth relation over all sigma within depth:
    /// runmax M'(sigma) >= growth_factor * floor(log2(runmax M(sigma) / M(empty))) - growth_constant.
    Rational growth_factor;
    Rational growth_constant;
    long bank_events = 0;
};

/// Working capital follows M proportionally; whenever it reaches 2 half of it
/// moves to a bank account that is never bet again. M' = bank + working.
/// Requires M(empty) > 0 and fairness to depth.
SavingsResult savings_transform(const Martingale& m, long depth);

}  // namespace randlab
