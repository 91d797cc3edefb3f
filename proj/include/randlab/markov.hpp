#pragma once

#include "randlab/cauchy.hpp"
#include "randlab/interval.hpp"
#include "randlab/rational.hpp"

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace randlab {

struct Breakpoint {
    Rational x;
    Rational y;
};

/// Piecewise-linear function on [0,1] through sorted breakpoints.
class PolygonalFunction {
public:
    /// Requires strictly increasing x with first x = 0 and last x = 1.
    explicit PolygonalFunction(std::vector<Breakpoint> breakpoints);

    const std::vector<Breakpoint>& breakpoints() const { return points_; }
    Rational value(const Rational& x) const;
    /// Largest |slope| over all linear pieces.
    Rational lipschitz_constant() const;
    bool is_nondecreasing() const;

private:
    std::vector<Breakpoint> points_;
};

/// A replayable enumeration of closed rational intervals, stage by stage.
/// size_bound[k] is the stage after which every new interval must be shorter
/// than 2^{-k}.
struct StagedCover {
    std::vector<std::vector<RationalInterval>> stages;
    std::vector<long> size_bound;

    std::vector<RationalInterval> all_intervals() const;
};

struct CoverCheck {
    enum class Violation { None, Overlap, Size };

    bool ok = true;
    Violation violation = Violation::None;
    long k = -1;      // size violation: the k whose bound failed
    long stage = -1;  // stage of the offending interval
    std::vector<RationalInterval> witnesses;
    std::string message;
};

/// Non-overlap plus the stage-size protocol, for every k < size_bound.size()
/// that does not exceed the number of stages.
CoverCheck check_H(const StagedCover& c);

enum class FunctionKind { Polygonal, CoverBased, Truncated, Symbolic };

std::string_view to_string(FunctionKind kind) noexcept;

/// A Markov computable function, evaluated exactly on rationals.
///
/// All kinds are constant outside [0,1]: arguments are clamped before
/// evaluation. Every kind is piecewise monotone between finitely many
/// critical points on any window, which makes exact hulls computable.
class MarkovFunction {
public:
    enum class Rule { Identity, Square, AbsOffset, Half, Complement, Constant };

    struct Symbolic {
        Rule rule;
        Rational parameter;  // offset for AbsOffset, value for Constant
    };

    /// A function that vanishes outside a finite family of closed intervals and
    /// is piecewise linear on each; it is zero at every interval endpoint.
    struct CoverPieces {
        std::vector<RationalInterval> intervals;
        std::vector<std::vector<Breakpoint>> shapes;  // per interval, includes both endpoints
    };

    struct TruncatedData {
        std::shared_ptr<const MarkovFunction> base;
        std::vector<RationalInterval> cover;  // sorted by lo
    };

    static MarkovFunction identity();
    static MarkovFunction square();
    static MarkovFunction abs_offset(const Rational& c);
    static MarkovFunction half();
    static MarkovFunction complement();
    static MarkovFunction constant(const Rational& c);
    static MarkovFunction polygonal(PolygonalFunction p);
    static MarkovFunction cover_based(CoverPieces pieces, std::string name);

    /// Builds a function from its CLI name: identity, square, half, complement,
    /// abs_offset(p/q), const(p/q), canonical_nonuc(N). Throws Error(ParseError).
    static MarkovFunction from_name(std::string_view name);

    FunctionKind kind() const;
    const std::string& name() const { return name_; }
    const std::optional<ModulusFunction>& modulus() const { return modulus_; }
    MarkovFunction with_modulus(ModulusFunction theta) const;
    MarkovFunction without_modulus() const;

    Rational value(const Rational& x) const;
    Rational operator()(const Rational& x) const { return value(x); }

    /// [min f, max f] over the closed window, clamped to [0,1].
    std::pair<Rational, Rational> hull(const Rational& lo, const Rational& hi) const;

    /// Interior points of (lo, hi) where the function may change monotonicity.
    std::vector<Rational> critical_points(const Rational& lo, const Rational& hi) const;

    const auto& data() const { return *data_; }

private:
    using Data = std::variant<PolygonalFunction, CoverPieces, TruncatedData, Symbolic>;

    MarkovFunction(Data data, std::string name, std::optional<ModulusFunction> modulus);

    std::shared_ptr<const Data> data_;
    std::string name_;
    std::optional<ModulusFunction> modulus_;

    friend MarkovFunction truncate(const MarkovFunction& f, const StagedCover& c);
};

/// The cover-based function with tents of height n on
/// I_n = [1 - 2^{-n}, 1 - 2^{-n-1}], n < stage_count. The point 1 is never
/// covered; near it the function takes arbitrarily large values.
MarkovFunction canonical_nonuc(long stage_count);

/// The n-th interval of the canonical enumeration.
RationalInterval canonical_interval(long n);

/// All sigma with |sigma| <= depth on which some pair of dyadic points of
/// denominator 2^{depth+4} in [sigma) differ in value by more than 2^{-n}.
/// Sorted by length, then lexicographically. depth <= 16.
std::vector<BitString> oscillation_tree(const MarkovFunction& f, long n, long depth);

/// [f,C]: linear across every interval of c, equal to f elsewhere.
/// Throws Error(CoverViolation) when check_H(c) fails.
MarkovFunction truncate(const MarkovFunction& f, const StagedCover& c);

struct SlopeCheck {
    bool pass = true;
    bool clause_ii = true;
    bool clause_iii = true;
    std::string counterexample;  // empty on PASS
    std::vector<Rational> evidence;  // exact values backing the counterexample
    long cover_intervals_checked = 0;
    long grid_pairs_checked = 0;
};

/// Checks w(b-a) < f(b) - f(a) on every cover interval and
/// [f,C](y) - [f,C](x) < z(y-x) on all dyadic pairs of denominator 2^grid.
/// Adjacent pairs are checked; strict inequality on all ordered pairs
/// follows by telescoping. Requires w < z and grid <= 12.
SlopeCheck slope_bounds_check(const MarkovFunction& f, const StagedCover& c, const Rational& w,
                              const Rational& z, long grid);

struct ExtensionValue {
    RationalInterval value;
    bool certified;
    long precision;  // index at which z was queried
};

/// Encloses R[f](z) in an interval of length <= 2^{-n+2}. Certified when f
/// declares a modulus; otherwise the hull over shrinking windows is returned
/// flagged non-certified, or Error(ExtensionUndefined) when it has not shrunk
/// by precision n + 8. n <= 20.
ExtensionValue eval_extension(const MarkovFunction& f, const CauchyName& z, long n);

}  // namespace randlab
