#include "randlab/interval.hpp"

#include "randlab/errors.hpp"

#include <algorithm>

namespace randlab {

void require_bits(std::string_view bits) {
    for (char c : bits) {
        if (c != '0' && c != '1') {
            throw Error(ErrorKind::InvalidArgument, "not a bit string: \"" + std::string(bits) + "\"");
        }
    }
}

RationalInterval::RationalInterval(Rational lo, Rational hi, bool lo_open, bool hi_open)
    : lo_(std::move(lo)), hi_(std::move(hi)), lo_open_(lo_open), hi_open_(hi_open) {
    if (hi_ < lo_ || (lo_ == hi_ && (lo_open_ || hi_open_))) {
        throw Error(ErrorKind::InvalidArgument, "empty interval " + to_string());
    }
}

RationalInterval RationalInterval::parse(std::string_view text) {
    const auto fail = [&] { return Error(ErrorKind::ParseError, "not an interval: \"" + std::string(text) + "\""); };
    if (text.size() < 5) throw fail();
    const char open_c = text.front();
    const char close_c = text.back();
    if ((open_c != '[' && open_c != '(') || (close_c != ']' && close_c != ')')) throw fail();
    const auto body = text.substr(1, text.size() - 2);
    const auto comma = body.find(',');
    if (comma == std::string_view::npos) throw fail();
    auto trim = [](std::string_view s) {
        while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
        while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
        return s;
    };
    Rational lo = Rational::parse(trim(body.substr(0, comma)));
    Rational hi = Rational::parse(trim(body.substr(comma + 1)));
    if (hi < lo || (lo == hi && (open_c == '(' || close_c == ')'))) throw fail();
    return {std::move(lo), std::move(hi), open_c == '(', close_c == ')'};
}

bool RationalInterval::contains(const Rational& x) const {
    const bool above = lo_ < x || (lo_ == x && !lo_open_);
    const bool below = x < hi_ || (x == hi_ && !hi_open_);
    return above && below;
}

bool RationalInterval::contains(const RationalInterval& inner) const {
    const bool left_ok = lo_ < inner.lo_ || (lo_ == inner.lo_ && (!lo_open_ || inner.lo_open_));
    const bool right_ok = inner.hi_ < hi_ || (hi_ == inner.hi_ && (!hi_open_ || inner.hi_open_));
    return left_ok && right_ok;
}

std::optional<RationalInterval> RationalInterval::intersect(const RationalInterval& other) const {
    Rational lo = max(lo_, other.lo_);
    bool lo_open = (lo_ == lo && lo_open_) || (other.lo_ == lo && other.lo_open_);
    Rational hi = min(hi_, other.hi_);
    bool hi_open = (hi_ == hi && hi_open_) || (other.hi_ == hi && other.hi_open_);
    if (hi < lo || (lo == hi && (lo_open || hi_open))) return std::nullopt;
    return RationalInterval(std::move(lo), std::move(hi), lo_open, hi_open);
}

bool RationalInterval::intersects(const RationalInterval& other) const {
    return intersect(other).has_value();
}

bool RationalInterval::overlaps_interior(const RationalInterval& other) const {
    return max(lo_, other.lo_) < min(hi_, other.hi_);
}

std::string RationalInterval::to_string() const {
    return std::string(lo_open_ ? "(" : "[") + lo_.to_string() + "," + hi_.to_string() + (hi_open_ ? ")" : "]");
}

Rational IntervalUnion::measure() const {
    Rational total;
    for (const auto& p : parts_) total += p.length();
    return total;
}

bool IntervalUnion::contains(const Rational& x) const {
    return std::any_of(parts_.begin(), parts_.end(), [&](const auto& p) { return p.contains(x); });
}

std::optional<RationalInterval> IntervalUnion::part_containing(const RationalInterval& window) const {
    for (const auto& p : parts_) {
        if (p.contains(window)) return p;
    }
    return std::nullopt;
}

bool IntervalUnion::intersects(const RationalInterval& window) const {
    return std::any_of(parts_.begin(), parts_.end(), [&](const auto& p) { return p.intersects(window); });
}

IntervalUnion IntervalUnion::unite(const IntervalUnion& other) const {
    std::vector<RationalInterval> all = parts_;
    all.insert(all.end(), other.parts_.begin(), other.parts_.end());
    return normalize_union(all);
}

IntervalUnion IntervalUnion::intersect(const RationalInterval& window) const {
    std::vector<RationalInterval> out;
    for (const auto& p : parts_) {
        if (auto i = p.intersect(window)) out.push_back(std::move(*i));
    }
    return normalize_union(out);
}

std::string IntervalUnion::to_string() const {
    std::string s = "{";
    for (std::size_t i = 0; i < parts_.size(); ++i) {
        if (i) s += " ";
        s += parts_[i].to_string();
    }
    return s + "}";
}

IntervalUnion normalize_union(std::span<const RationalInterval> intervals) {
    std::vector<RationalInterval> sorted(intervals.begin(), intervals.end());
    std::sort(sorted.begin(), sorted.end(), [](const RationalInterval& a, const RationalInterval& b) {
        if (a.lo() != b.lo()) return a.lo() < b.lo();
        return !a.lo_open() && b.lo_open();
    });
    IntervalUnion out;
    for (auto& iv : sorted) {
        if (out.parts_.empty()) {
            out.parts_.push_back(std::move(iv));
            continue;
        }
        auto& cur = out.parts_.back();
        const bool joins = iv.lo() < cur.hi() || (iv.lo() == cur.hi() && (!cur.hi_open() || !iv.lo_open()));
        if (!joins) {
            out.parts_.push_back(std::move(iv));
            continue;
        }
        if (cur.hi() < iv.hi()) {
            cur = RationalInterval(cur.lo(), iv.hi(), cur.lo_open(), iv.hi_open());
        } else if (cur.hi() == iv.hi() && cur.hi_open() && !iv.hi_open()) {
            cur = RationalInterval(cur.lo(), cur.hi(), cur.lo_open(), false);
        }
    }
    return out;
}

Rational total_length(std::span<const RationalInterval> intervals) {
    Rational total;
    for (const auto& iv : intervals) total += iv.length();
    return total;
}

IntervalUnion coverage_at_least(std::span<const IntervalUnion> sets, long threshold) {
    if (threshold < 1) throw Error(ErrorKind::InvalidArgument, "coverage threshold must be >= 1");
    std::vector<Rational> cuts;
    for (const auto& s : sets) {
        for (const auto& p : s.parts()) {
            cuts.push_back(p.lo());
            cuts.push_back(p.hi());
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    auto count_at = [&](const Rational& x) {
        long n = 0;
        for (const auto& s : sets) n += s.contains(x) ? 1 : 0;
        return n;
    };

    std::vector<RationalInterval> pieces;
    for (std::size_t i = 0; i < cuts.size(); ++i) {
        if (count_at(cuts[i]) >= threshold) pieces.push_back(RationalInterval::point(cuts[i]));
        if (i + 1 < cuts.size()) {
            const Rational mid = (cuts[i] + cuts[i + 1]) / Rational(2);
            if (count_at(mid) >= threshold) pieces.push_back(RationalInterval::open(cuts[i], cuts[i + 1]));
        }
    }
    return normalize_union(pieces);
}

Rational dyadic_value(std::string_view sigma) {
    require_bits(sigma);
    if (sigma.empty()) return Rational(0);
    const mpz_class num(std::string(sigma), 2);
    return Rational(num, mpz_class(1)) * Rational::pow2(-static_cast<long>(sigma.size()));
}

RationalInterval dyadic_cylinder(std::string_view sigma) {
    Rational lo = dyadic_value(sigma);
    Rational hi = lo + Rational::pow2(-static_cast<long>(sigma.size()));
    return RationalInterval::half_open(std::move(lo), std::move(hi));
}

}  // namespace randlab
