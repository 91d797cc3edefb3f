#pragma once

#include "randlab/rational.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace randlab {

/// A finite binary string over {'0','1'}.
using BitString = std::string;

/// Throws Error(InvalidArgument) unless every character is '0' or '1'.
void require_bits(std::string_view bits);

/// Rational interval with explicit endpoint openness.
///
/// lo <= hi always; lo == hi only as the closed point interval [a,a].
class RationalInterval {
public:
    RationalInterval(Rational lo, Rational hi, bool lo_open = false, bool hi_open = false);

    static RationalInterval closed(Rational lo, Rational hi) { return {std::move(lo), std::move(hi), false, false}; }
    static RationalInterval open(Rational lo, Rational hi) { return {std::move(lo), std::move(hi), true, true}; }
    static RationalInterval half_open(Rational lo, Rational hi) { return {std::move(lo), std::move(hi), false, true}; }
    static RationalInterval point(const Rational& x) { return {x, x, false, false}; }

    /// Parses "[lo,hi)", "(lo,hi]", etc. Throws Error(ParseError).
    static RationalInterval parse(std::string_view text);

    const Rational& lo() const { return lo_; }
    const Rational& hi() const { return hi_; }
    bool lo_open() const { return lo_open_; }
    bool hi_open() const { return hi_open_; }

    Rational length() const { return hi_ - lo_; }
    bool is_point() const { return lo_ == hi_; }
    bool contains(const Rational& x) const;
    /// True iff every point of `inner` lies in this interval.
    bool contains(const RationalInterval& inner) const;
    /// True iff the two intervals share at least one point.
    bool intersects(const RationalInterval& other) const;
    /// Shares an interior point (not just an endpoint).
    bool overlaps_interior(const RationalInterval& other) const;
    std::optional<RationalInterval> intersect(const RationalInterval& other) const;

    std::string to_string() const;

    friend bool operator==(const RationalInterval&, const RationalInterval&) = default;

private:
    Rational lo_;
    Rational hi_;
    bool lo_open_;
    bool hi_open_;
};

/// Finite union of pairwise disjoint, sorted, maximally merged intervals.
class IntervalUnion {
public:
    IntervalUnion() = default;

    const std::vector<RationalInterval>& parts() const { return parts_; }
    bool empty() const { return parts_.empty(); }

    /// Exact Lebesgue measure.
    Rational measure() const;
    bool contains(const Rational& x) const;
    /// The part containing all of `window`, if one exists.
    std::optional<RationalInterval> part_containing(const RationalInterval& window) const;
    bool intersects(const RationalInterval& window) const;

    IntervalUnion unite(const IntervalUnion& other) const;
    IntervalUnion intersect(const RationalInterval& window) const;

    std::string to_string() const;

    friend bool operator==(const IntervalUnion&, const IntervalUnion&) = default;

private:
    friend IntervalUnion normalize_union(std::span<const RationalInterval> intervals);
    std::vector<RationalInterval> parts_;
};

/// Canonical disjoint sorted form covering exactly the same points.
IntervalUnion normalize_union(std::span<const RationalInterval> intervals);

/// Exact total length of a normalized union.
inline Rational measure(const IntervalUnion& u) { return u.measure(); }

/// Sum of lengths, counting overlaps repeatedly.
Rational total_length(std::span<const RationalInterval> intervals);

/// Points lying in at least `threshold` of the given sets (threshold >= 1).
IntervalUnion coverage_at_least(std::span<const IntervalUnion> sets, long threshold);

/// [0.sigma, 0.sigma + 2^{-|sigma|}) as a half-open interval.
RationalInterval dyadic_cylinder(std::string_view sigma);

/// 0.sigma as a rational.
Rational dyadic_value(std::string_view sigma);

}  // namespace randlab
