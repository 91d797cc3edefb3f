#pragma once

#include "randlab/check.hpp"
#include "randlab/interval.hpp"
#include "randlab/markov.hpp"
#include "randlab/rational.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace randlab {

/// Total truth-table functional on binary sequences, materialized for output
/// positions n < outputs(). Output bit n reads the first use(n) input bits.
class TTFunctional {
public:
    enum class Rule { Identity, PairwiseOr, BitFlip, Table, Custom };
    using BitRule = std::function<int(long n, std::string_view block)>;

    /// u(n) = n + 1, bit n = input bit n.
    static TTFunctional identity(long outputs = 24);
    /// u(n) = 2n + 2, bit n = input bit 2n OR input bit 2n+1.
    static TTFunctional pairwise_or(long outputs = 12);
    /// u(n) = n + 1, bit n = NOT input bit n.
    static TTFunctional bit_flip(long outputs = 24);
    /// tables[n] has length 2^{use[n]}; character k is the output on the block
    /// whose MSB-first binary value is k.
    static TTFunctional table(std::vector<long> use, std::vector<std::string> tables, std::string name = "table");
    static TTFunctional custom(std::vector<long> use, BitRule rule, std::string name);
    /// "identity", "pairwise_or", "bit_flip". Throws Error(ParseError).
    static TTFunctional from_rule(std::string_view rule, long outputs);

    Rule rule() const { return rule_; }
    const std::string& name() const { return name_; }
    long outputs() const { return static_cast<long>(use_.size()); }
    long use(long n) const;
    const std::vector<long>& use_bounds() const { return use_; }

    /// Output bit n on a block of at least use(n) input bits.
    int bit(long n, std::string_view block) const;
    /// Same, with the first `length` input bits packed MSB-first in `block`.
    int bit(long n, std::uint64_t block, long length) const;
    /// All output bits n with use(n) <= |input|, n < outputs().
    BitString apply(std::string_view input) const;

private:
    TTFunctional(Rule rule, std::vector<long> use, std::string name);

    Rule rule_;
    std::vector<long> use_;
    std::string name_;
    std::shared_ptr<const std::vector<std::string>> tables_;
    std::shared_ptr<const BitRule> custom_;
};

/// Largest input length enumerated by brute-force preimage counts.
inline constexpr long kMaxEnumeratedUse = 24;

/// Exact lambda_Phi([sigma]) by counting input blocks of length u(|sigma|-1).
/// Throws Error(BudgetExceeded) when that use exceeds 24 or |sigma| > outputs.
Rational induced_measure(const TTFunctional& phi, std::string_view sigma);

/// A measure on Cantor space given by its cylinder masses up to a depth budget.
class CylinderMeasure {
public:
    static constexpr long kSymbolicBudget = 64;

    static CylinderMeasure uniform();
    /// mass("1") = p.
    static CylinderMeasure bernoulli(const Rational& p);
    /// Keys are bit strings; the budget is the largest length present.
    static CylinderMeasure from_table(std::map<BitString, Rational> table, std::string name = "table");
    /// lambda_Phi materialized level by level, each level from its own preimage count.
    static CylinderMeasure induced(const TTFunctional& phi, long depth);

    const std::string& name() const { return name_; }
    long budget() const { return budget_; }
    /// Throws Error(BudgetExceeded) past the budget, Error(FixtureInvalid) when a
    /// table entry is missing.
    Rational mass(std::string_view sigma) const;

private:
    enum class Kind { Uniform, Bernoulli, Table };
    CylinderMeasure(Kind kind, std::string name, long budget);

    Kind kind_;
    std::string name_;
    long budget_;
    Rational p_;
    std::shared_ptr<const std::map<BitString, Rational>> table_;
};

/// Range [0,1], mass(empty) = 1, and additivity on every sigma with
/// |sigma| < depth; reports the first violation with exact values.
CheckReport validate_measure(const CylinderMeasure& mu, long depth);

/// g(d) = mu([0, d)) for a dyadic d in [0,1] with denominator within budget.
Rational cdf(const CylinderMeasure& mu, const Rational& d);

enum class TransportStatus { Complete, NeedMoreInput };

std::string_view to_string(TransportStatus s) noexcept;

struct TransportResult {
    BitString c_prefix;
    RationalInterval image;  // [g(0.a), g(0.a) + mu([a]))
    TransportStatus status;
};

/// Longest c whose cylinder contains the image of [a]. NEED_MORE_INPUT when c
/// is shorter than `want` (default |a|). Throws Error(ZeroMassCylinder) or
/// Error(AtomSuspected).
TransportResult transport(const CylinderMeasure& mu, std::string_view a_prefix, long want = -1);

/// Pairwise monotonicity over all disjoint inputs of length <= depth, and
/// prefix-coherence along every one-bit extension.
CheckReport transport_order_check(const CylinderMeasure& mu, long depth);

struct PushforwardReport {
    Rational sum;
    Rational target;
    Rational residual;
    bool pass;
};

/// Requires depth >= |tau| + 4. Throws Error(InvalidArgument) otherwise.
PushforwardReport transport_pushforward_check(const CylinderMeasure& mu, std::string_view tau, long depth);

/// Bit n reads u(n) = precision_for(theta(2^{-n-2})) input bits (made
/// monotone) and is bit n of the left end of the image hull; a hull
/// straddling a cut resolves downward. Requires a declared modulus.
TTFunctional tt_from_ucf(const MarkovFunction& g, long depth);

}  // namespace randlab
