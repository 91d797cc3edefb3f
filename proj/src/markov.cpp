#include "randlab/markov.hpp"

#include "randlab/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>

namespace randlab {

namespace {

Rational clamp_unit(const Rational& x) {
    if (x.sign() < 0) return Rational(0);
    if (x > Rational(1)) return Rational(1);
    return x;
}

Rational lerp(const Breakpoint& a, const Breakpoint& b, const Rational& x) {
    return a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x);
}

// Evaluates a sorted breakpoint list on [front.x, back.x].
Rational eval_breakpoints(const std::vector<Breakpoint>& pts, const Rational& x) {
    auto it = std::upper_bound(pts.begin(), pts.end(), x,
                               [](const Rational& v, const Breakpoint& b) { return v < b.x; });
    if (it == pts.begin()) return pts.front().y;
    if (it == pts.end()) return pts.back().y;
    const auto& right = *it;
    const auto& left = *(it - 1);
    if (left.x == x) return left.y;
    return lerp(left, right, x);
}

void validate_breakpoints(const std::vector<Breakpoint>& pts, const Rational& lo, const Rational& hi,
                          const std::string& what) {
    if (pts.size() < 2) throw Error(ErrorKind::InvalidArgument, what + ": need at least two breakpoints");
    if (pts.front().x != lo || pts.back().x != hi) {
        throw Error(ErrorKind::InvalidArgument, what + ": breakpoints must span [" + lo.to_string() + "," +
                                                    hi.to_string() + "]");
    }
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (!(pts[i - 1].x < pts[i].x)) {
            throw Error(ErrorKind::InvalidArgument, what + ": x-coordinates must be strictly increasing");
        }
    }
}

std::string_view strip_call(std::string_view name, std::string_view head) {
    if (name.size() < head.size() + 2 || name.substr(0, head.size()) != head || name[head.size()] != '(' ||
        name.back() != ')') {
        return {};
    }
    return name.substr(head.size() + 1, name.size() - head.size() - 2);
}

}  // namespace

// ---------------------------------------------------------------------------
// PolygonalFunction

PolygonalFunction::PolygonalFunction(std::vector<Breakpoint> breakpoints) : points_(std::move(breakpoints)) {
    validate_breakpoints(points_, Rational(0), Rational(1), "polygonal function");
}

Rational PolygonalFunction::value(const Rational& x) const { return eval_breakpoints(points_, clamp_unit(x)); }

Rational PolygonalFunction::lipschitz_constant() const {
    Rational best;
    for (std::size_t i = 1; i < points_.size(); ++i) {
        best = max(best, abs((points_[i].y - points_[i - 1].y) / (points_[i].x - points_[i - 1].x)));
    }
    return best;
}

bool PolygonalFunction::is_nondecreasing() const {
    for (std::size_t i = 1; i < points_.size(); ++i) {
        if (points_[i].y < points_[i - 1].y) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// StagedCover

std::vector<RationalInterval> StagedCover::all_intervals() const {
    std::vector<RationalInterval> out;
    for (const auto& stage : stages) out.insert(out.end(), stage.begin(), stage.end());
    return out;
}

CoverCheck check_H(const StagedCover& c) {
    CoverCheck report;
    struct Entry {
        const RationalInterval* iv;
        long stage;
    };
    std::vector<Entry> entries;
    for (std::size_t s = 0; s < c.stages.size(); ++s) {
        for (const auto& iv : c.stages[s]) entries.push_back({&iv, static_cast<long>(s)});
    }

    for (std::size_t i = 0; i < entries.size(); ++i) {
        for (std::size_t j = i + 1; j < entries.size(); ++j) {
            if (entries[i].iv->overlaps_interior(*entries[j].iv)) {
                report.ok = false;
                report.violation = CoverCheck::Violation::Overlap;
                report.stage = entries[j].stage;
                report.witnesses = {*entries[i].iv, *entries[j].iv};
                report.message = "intervals " + entries[i].iv->to_string() + " and " + entries[j].iv->to_string() +
                                 " overlap";
                return report;
            }
        }
    }

    const long stage_count = static_cast<long>(c.stages.size());
    for (std::size_t k = 0; k < c.size_bound.size() && static_cast<long>(k) <= stage_count; ++k) {
        const long after = c.size_bound[k];
        const Rational bound = Rational::pow2(-static_cast<long>(k));
        for (const auto& e : entries) {
            if (e.stage > after && !(e.iv->length() < bound)) {
                report.ok = false;
                report.violation = CoverCheck::Violation::Size;
                report.k = static_cast<long>(k);
                report.stage = e.stage;
                report.witnesses = {*e.iv};
                report.message = "interval " + e.iv->to_string() + " enumerated at stage " + std::to_string(e.stage) +
                                 " after size_bound(" + std::to_string(k) + ") = " + std::to_string(after) +
                                 " has length " + e.iv->length().to_string() + " >= " + bound.to_string();
                return report;
            }
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// MarkovFunction

std::string_view to_string(FunctionKind kind) noexcept {
    switch (kind) {
        case FunctionKind::Polygonal: return "POLYGONAL";
        case FunctionKind::CoverBased: return "COVER_BASED";
        case FunctionKind::Truncated: return "TRUNCATED";
        case FunctionKind::Symbolic: return "SYMBOLIC";
    }
    return "SYMBOLIC";
}

MarkovFunction::MarkovFunction(Data data, std::string name, std::optional<ModulusFunction> modulus)
    : data_(std::make_shared<const Data>(std::move(data))), name_(std::move(name)), modulus_(std::move(modulus)) {}

MarkovFunction MarkovFunction::identity() {
    return {Symbolic{Rule::Identity, Rational(0)}, "identity", ModulusFunction::linear(Rational(1))};
}

MarkovFunction MarkovFunction::square() {
    // |x^2 - y^2| <= 2|x - y| on [0,1]
    return {Symbolic{Rule::Square, Rational(0)}, "square", ModulusFunction::linear(Rational(1, 2))};
}

MarkovFunction MarkovFunction::abs_offset(const Rational& c) {
    return {Symbolic{Rule::AbsOffset, c}, "abs_offset(" + c.to_string() + ")", ModulusFunction::linear(Rational(1))};
}

MarkovFunction MarkovFunction::half() {
    return {Symbolic{Rule::Half, Rational(0)}, "half", ModulusFunction::linear(Rational(2))};
}

MarkovFunction MarkovFunction::complement() {
    return {Symbolic{Rule::Complement, Rational(0)}, "complement", ModulusFunction::linear(Rational(1))};
}

MarkovFunction MarkovFunction::constant(const Rational& c) {
    return {Symbolic{Rule::Constant, c}, "const(" + c.to_string() + ")",
            ModulusFunction([](const Rational&) { return Rational(1); }, "theta(eps) = 1")};
}

MarkovFunction MarkovFunction::polygonal(PolygonalFunction p) {
    const Rational lip = p.lipschitz_constant();
    std::optional<ModulusFunction> theta;
    if (lip.is_zero()) {
        theta = ModulusFunction([](const Rational&) { return Rational(1); }, "theta(eps) = 1");
    } else {
        theta = ModulusFunction::linear(Rational(1) / lip);
    }
    return {std::move(p), "polygonal", std::move(theta)};
}

MarkovFunction MarkovFunction::cover_based(CoverPieces pieces, std::string name) {
    if (pieces.intervals.size() != pieces.shapes.size()) {
        throw Error(ErrorKind::InvalidArgument, "cover-based function: one shape per interval required");
    }
    for (std::size_t i = 0; i < pieces.intervals.size(); ++i) {
        const auto& iv = pieces.intervals[i];
        validate_breakpoints(pieces.shapes[i], iv.lo(), iv.hi(), "cover piece " + iv.to_string());
        if (!pieces.shapes[i].front().y.is_zero() || !pieces.shapes[i].back().y.is_zero()) {
            throw Error(ErrorKind::InvalidArgument, "cover piece " + iv.to_string() + " must vanish at its endpoints");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (iv.overlaps_interior(pieces.intervals[j])) {
                throw Error(ErrorKind::InvalidArgument, "cover pieces overlap");
            }
        }
    }
    // Keep pieces sorted for lookup.
    std::vector<std::size_t> order(pieces.intervals.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return pieces.intervals[a].lo() < pieces.intervals[b].lo(); });
    CoverPieces sorted;
    for (auto i : order) {
        sorted.intervals.push_back(pieces.intervals[i]);
        sorted.shapes.push_back(pieces.shapes[i]);
    }
    return {std::move(sorted), std::move(name), std::nullopt};
}

MarkovFunction MarkovFunction::from_name(std::string_view name) {
    if (name == "identity") return identity();
    if (name == "square") return square();
    if (name == "half") return half();
    if (name == "complement") return complement();
    if (name == "zero") return constant(Rational(0));
    if (auto arg = strip_call(name, "abs_offset"); !arg.empty()) return abs_offset(Rational::parse(arg));
    if (auto arg = strip_call(name, "const"); !arg.empty()) return constant(Rational::parse(arg));
    if (auto arg = strip_call(name, "canonical_nonuc"); !arg.empty()) {
        long n = 0;
        const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), n);
        if (ec != std::errc() || ptr != arg.data() + arg.size()) {
            throw Error(ErrorKind::ParseError, "bad stage count in \"" + std::string(name) + "\"");
        }
        return canonical_nonuc(n);
    }
    throw Error(ErrorKind::ParseError, "unknown function \"" + std::string(name) + "\"");
}

FunctionKind MarkovFunction::kind() const {
    return std::visit(
        [](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, PolygonalFunction>) return FunctionKind::Polygonal;
            else if constexpr (std::is_same_v<T, CoverPieces>) return FunctionKind::CoverBased;
            else if constexpr (std::is_same_v<T, TruncatedData>) return FunctionKind::Truncated;
            else return FunctionKind::Symbolic;
        },
        *data_);
}

MarkovFunction MarkovFunction::with_modulus(ModulusFunction theta) const {
    MarkovFunction copy = *this;
    copy.modulus_ = std::move(theta);
    return copy;
}

MarkovFunction MarkovFunction::without_modulus() const {
    MarkovFunction copy = *this;
    copy.modulus_.reset();
    return copy;
}

namespace {

struct ValueVisitor {
    const Rational& x;

    Rational operator()(const PolygonalFunction& p) const { return p.value(x); }

    Rational operator()(const MarkovFunction::CoverPieces& c) const {
        auto it = std::upper_bound(c.intervals.begin(), c.intervals.end(), x,
                                   [](const Rational& v, const RationalInterval& iv) { return v < iv.lo(); });
        if (it == c.intervals.begin()) return Rational(0);
        const auto idx = static_cast<std::size_t>(it - c.intervals.begin() - 1);
        if (!c.intervals[idx].contains(x)) return Rational(0);
        return eval_breakpoints(c.shapes[idx], x);
    }

    Rational operator()(const MarkovFunction::TruncatedData& t) const {
        for (const auto& iv : t.cover) {
            if (iv.lo() < x && x < iv.hi()) {
                return lerp({iv.lo(), t.base->value(iv.lo())}, {iv.hi(), t.base->value(iv.hi())}, x);
            }
        }
        return t.base->value(x);
    }

    Rational operator()(const MarkovFunction::Symbolic& s) const {
        using Rule = MarkovFunction::Rule;
        switch (s.rule) {
            case Rule::Identity: return x;
            case Rule::Square: return x * x;
            case Rule::AbsOffset: return abs(x - s.parameter);
            case Rule::Half: return x / Rational(2);
            case Rule::Complement: return Rational(1) - x;
            case Rule::Constant: return s.parameter;
        }
        return x;
    }
};

void push_inside(std::vector<Rational>& out, const Rational& p, const Rational& lo, const Rational& hi) {
    if (lo < p && p < hi) out.push_back(p);
}

}  // namespace

Rational MarkovFunction::value(const Rational& x) const {
    const Rational clamped = clamp_unit(x);
    return std::visit(ValueVisitor{clamped}, *data_);
}

std::vector<Rational> MarkovFunction::critical_points(const Rational& lo, const Rational& hi) const {
    std::vector<Rational> out;
    std::visit(
        [&](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, PolygonalFunction>) {
                for (const auto& b : d.breakpoints()) push_inside(out, b.x, lo, hi);
            } else if constexpr (std::is_same_v<T, CoverPieces>) {
                for (const auto& shape : d.shapes) {
                    for (const auto& b : shape) push_inside(out, b.x, lo, hi);
                }
            } else if constexpr (std::is_same_v<T, TruncatedData>) {
                for (const auto& iv : d.cover) {
                    push_inside(out, iv.lo(), lo, hi);
                    push_inside(out, iv.hi(), lo, hi);
                }
                for (auto& p : d.base->critical_points(lo, hi)) {
                    const bool covered = std::any_of(d.cover.begin(), d.cover.end(), [&](const RationalInterval& iv) {
                        return iv.lo() < p && p < iv.hi();
                    });
                    if (!covered) out.push_back(std::move(p));
                }
            } else {
                if (d.rule == Rule::AbsOffset) push_inside(out, d.parameter, lo, hi);
            }
        },
        *data_);
    return out;
}

std::pair<Rational, Rational> MarkovFunction::hull(const Rational& lo, const Rational& hi) const {
    if (hi < lo) throw Error(ErrorKind::InvalidArgument, "hull over an empty window");
    const Rational a = clamp_unit(lo);
    const Rational b = clamp_unit(hi);
    Rational vmin = value(a);
    Rational vmax = vmin;
    auto visit_point = [&](const Rational& p) {
        Rational v = value(p);
        if (v < vmin) vmin = v;
        if (vmax < v) vmax = std::move(v);
    };
    visit_point(b);
    for (const auto& p : critical_points(a, b)) visit_point(p);
    return {std::move(vmin), std::move(vmax)};
}

// ---------------------------------------------------------------------------
// Canonical non-uniformly-continuous function

RationalInterval canonical_interval(long n) {
    if (n < 0) throw Error(ErrorKind::InvalidArgument, "canonical interval index must be non-negative");
    return RationalInterval::closed(Rational(1) - Rational::pow2(-n), Rational(1) - Rational::pow2(-n - 1));
}

MarkovFunction canonical_nonuc(long stage_count) {
    if (stage_count < 1) throw Error(ErrorKind::InvalidArgument, "canonical_nonuc needs stage_count >= 1");
    MarkovFunction::CoverPieces pieces;
    for (long n = 0; n < stage_count; ++n) {
        auto iv = canonical_interval(n);
        const Rational mid = (iv.lo() + iv.hi()) / Rational(2);
        pieces.shapes.push_back({{iv.lo(), Rational(0)}, {mid, Rational(n)}, {iv.hi(), Rational(0)}});
        pieces.intervals.push_back(std::move(iv));
    }
    return MarkovFunction::cover_based(std::move(pieces), "canonical_nonuc(" + std::to_string(stage_count) + ")");
}

// ---------------------------------------------------------------------------
// Oscillation tree

std::vector<BitString> oscillation_tree(const MarkovFunction& f, long n, long depth) {
    if (depth < 0) throw Error(ErrorKind::InvalidArgument, "depth must be non-negative");
    if (depth > 16) throw Error(ErrorKind::BudgetExceeded, "oscillation_tree depth " + std::to_string(depth) + " > 16");

    const long grid_exp = depth + 4;
    const std::size_t leaves = std::size_t{1} << depth;  // cylinders of length `depth`
    const std::size_t per_leaf = 16;                     // grid points per leaf cylinder
    const Rational step = Rational::pow2(-grid_exp);

    std::vector<Rational> lo(leaves);
    std::vector<Rational> hi(leaves);
    for (std::size_t leaf = 0; leaf < leaves; ++leaf) {
        for (std::size_t j = 0; j < per_leaf; ++j) {
            Rational v = f.value(Rational(static_cast<long>(leaf * per_leaf + j)) * step);
            if (j == 0) {
                lo[leaf] = v;
                hi[leaf] = std::move(v);
            } else if (v < lo[leaf]) {
                lo[leaf] = std::move(v);
            } else if (hi[leaf] < v) {
                hi[leaf] = std::move(v);
            }
        }
    }

    const Rational threshold = Rational::pow2(-n);
    std::vector<std::vector<BitString>> by_level(static_cast<std::size_t>(depth + 1));
    for (long level = depth;; --level) {
        const std::size_t count = std::size_t{1} << level;
        for (std::size_t i = 0; i < count; ++i) {
            if (hi[i] - lo[i] > threshold) {
                BitString sigma(static_cast<std::size_t>(level), '0');
                for (long b = 0; b < level; ++b) {
                    if ((i >> (level - 1 - b)) & 1U) sigma[static_cast<std::size_t>(b)] = '1';
                }
                by_level[static_cast<std::size_t>(level)].push_back(std::move(sigma));
            }
        }
        if (level == 0) break;
        for (std::size_t i = 0; i < count / 2; ++i) {
            lo[i] = min(lo[2 * i], lo[2 * i + 1]);
            hi[i] = max(hi[2 * i], hi[2 * i + 1]);
        }
    }

    std::vector<BitString> out;
    for (auto& level : by_level) {
        for (auto& s : level) out.push_back(std::move(s));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Truncation

MarkovFunction truncate(const MarkovFunction& f, const StagedCover& c) {
    const auto check = check_H(c);
    if (!check.ok) throw Error(ErrorKind::CoverViolation, check.message);
    MarkovFunction::TruncatedData data;
    data.base = std::make_shared<const MarkovFunction>(f);
    data.cover = c.all_intervals();
    std::sort(data.cover.begin(), data.cover.end(),
              [](const RationalInterval& a, const RationalInterval& b) { return a.lo() < b.lo(); });
    return MarkovFunction(std::move(data), "[" + f.name() + ",C]", std::nullopt);
}

SlopeCheck slope_bounds_check(const MarkovFunction& f, const StagedCover& c, const Rational& w, const Rational& z,
                              long grid) {
    if (!(w < z)) throw Error(ErrorKind::InvalidArgument, "slope_bounds_check requires w < z");
    if (grid < 0 || grid > 12) {
        throw Error(ErrorKind::BudgetExceeded, "grid exponent " + std::to_string(grid) + " outside [0,12]");
    }
    SlopeCheck out;

    for (const auto& iv : c.all_intervals()) {
        ++out.cover_intervals_checked;
        const Rational rise = f.value(iv.hi()) - f.value(iv.lo());
        const Rational floor_rise = w * iv.length();
        if (!(floor_rise < rise)) {
            out.pass = false;
            out.clause_ii = false;
            out.counterexample = "clause (ii) fails on " + iv.to_string() + ": w(b-a) = " + floor_rise.to_string() +
                                 " is not below f(b)-f(a) = " + rise.to_string();
            out.evidence = {iv.lo(), iv.hi(), floor_rise, rise};
            return out;
        }
    }

    const MarkovFunction truncated = truncate(f, c);
    const long points = 1L << grid;
    const Rational step = Rational::pow2(-grid);
    Rational prev = truncated.value(Rational(0));
    for (long j = 1; j <= points; ++j) {
        const Rational x = Rational(j - 1) * step;
        const Rational y = Rational(j) * step;
        Rational cur = truncated.value(y);
        ++out.grid_pairs_checked;
        const Rational rise = cur - prev;
        const Rational cap = z * step;
        if (!(rise < cap)) {
            out.pass = false;
            out.clause_iii = false;
            out.counterexample = "clause (iii) fails on x = " + x.to_string() + ", y = " + y.to_string() +
                                 ": [f,C](y) - [f,C](x) = " + rise.to_string() + " is not below z(y-x) = " +
                                 cap.to_string();
            out.evidence = {x, y, rise, cap};
            return out;
        }
        prev = std::move(cur);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Extension R[f]

namespace {

RationalInterval clamp_window(const RationalInterval& w) {
    const Rational lo = clamp_unit(w.lo());
    const Rational hi = clamp_unit(w.hi());
    return RationalInterval::closed(lo, hi);
}

}  // namespace

ExtensionValue eval_extension(const MarkovFunction& f, const CauchyName& z, long n) {
    constexpr long kMaxPrecision = 20;
    constexpr long kRefinementSteps = 8;
    if (n < 0 || n > kMaxPrecision) {
        throw Error(ErrorKind::BudgetExceeded, "eval_extension precision " + std::to_string(n) + " outside [0,20]");
    }
    const Rational target = Rational::pow2(-n + 2);

    if (f.modulus()) {
        // Window width 2^{-p+1} must not exceed theta(2^{-n+2}).
        const Rational delta = (*f.modulus())(target);
        const long p = std::max(n, precision_for(delta) + 1);
        const auto window = clamp_window(z.window(p));
        auto [lo, hi] = f.hull(window.lo(), window.hi());
        return {RationalInterval::closed(std::move(lo), std::move(hi)), true, p};
    }

    const long last = n + kRefinementSteps;
    for (long p = n; p <= last; ++p) {
        const auto window = clamp_window(z.window(p));
        auto [lo, hi] = f.hull(window.lo(), window.hi());
        if (hi - lo <= target) return {RationalInterval::closed(std::move(lo), std::move(hi)), false, p};
    }
    const auto window = clamp_window(z.window(last));
    const auto [lo, hi] = f.hull(window.lo(), window.hi());
    throw Error(ErrorKind::ExtensionUndefined,
                "hull of " + f.name() + " over " + window.to_string() + " is [" + lo.to_string() + "," +
                    hi.to_string() + "], wider than " + target.to_string() + " at precision " + std::to_string(last));
}

}  // namespace randlab
