#include "randlab/derivatives.hpp"

#include "randlab/errors.hpp"

#include <algorithm>
#include <vector>

namespace randlab {

Rational slope(const MarkovFunction& f, const Rational& a, const Rational& b) {
    if (a == b) throw Error(ErrorKind::DegeneratePair, "slope needs a != b, got a = b = " + a.to_string());
    return (f.value(a) - f.value(b)) / (a - b);
}

namespace {

struct Extremes {
    std::optional<SlopeSample> hi;
    std::optional<SlopeSample> lo;
    long pairs = 0;

    void add(const Rational& a, const Rational& b, const Rational& s) {
        ++pairs;
        if (!hi || hi->value < s) hi = SlopeSample{a, b, s};
        if (!lo || s < lo->value) lo = SlopeSample{a, b, s};
    }
};

long clamp_index(const mpz_class& v, long n) {
    if (v < 0) return 0;
    if (v > n) return n;
    return v.get_si();
}

}  // namespace

PseudoDerivativeEstimate pseudo_derivative(const MarkovFunction& f, const CauchyName& z, const Rational& scale,
                                           long grid_exponent) {
    constexpr long kMaxPairs = 1L << 22;
    if (grid_exponent < 0 || grid_exponent > 14) {
        throw Error(ErrorKind::BudgetExceeded, "grid exponent " + std::to_string(grid_exponent) + " outside [0,14]");
    }
    if (scale < Rational::pow2(-grid_exponent - 2)) {
        throw Error(ErrorKind::InvalidArgument, "scale " + scale.to_string() + " below 2^{-grid-2}");
    }

    const long n = 1L << grid_exponent;
    const Rational step = Rational::pow2(-grid_exponent);
    const Rational grid_n(n);
    const auto window = z.window(grid_exponent + 2);
    const Rational& wl = window.lo();
    const Rational& wh = window.hi();

    // a <= wl, b >= wh, 0 < b - a <= scale.
    const long a_first = clamp_index(((wh - scale) * grid_n).ceil(), n);
    const long a_last = clamp_index((wl * grid_n).floor(), n);
    const long b_first = clamp_index((wh * grid_n).ceil(), n);
    const long b_last_global = clamp_index(((wl + scale) * grid_n).floor(), n);

    PseudoDerivativeEstimate out;
    out.scale = scale;
    out.grid_exponent = grid_exponent;

    if ((wh - scale) * grid_n > grid_n || wl.sign() < 0 || a_first > a_last || b_first > b_last_global) {
        return out;
    }
    const long a_count = a_last - a_first + 1;
    const long b_count = b_last_global - b_first + 1;
    if (a_count * b_count > kMaxPairs) {
        throw Error(ErrorKind::BudgetExceeded, "pseudo_derivative would enumerate more than 2^22 pairs");
    }

    std::vector<Rational> values(static_cast<std::size_t>(b_last_global - a_first + 1));
    for (long j = a_first; j <= b_last_global; ++j) values[static_cast<std::size_t>(j - a_first)] = f.value(Rational(j) * step);

    const Rational half_scale = scale / Rational(2);
    Extremes full;
    Extremes halved;
    for (long ia = a_first; ia <= a_last; ++ia) {
        const Rational a = Rational(ia) * step;
        const Rational& fa = values[static_cast<std::size_t>(ia - a_first)];
        for (long ib = std::max(b_first, ia + 1); ib <= b_last_global; ++ib) {
            const Rational b = Rational(ib) * step;
            const Rational width = b - a;
            if (width > scale) break;
            const Rational s = (fa - values[static_cast<std::size_t>(ib - a_first)]) / (a - b);
            full.add(a, b, s);
            if (width <= half_scale) halved.add(a, b, s);
        }
    }
    if (full.pairs == 0) return out;

    const Rational threshold = blowup_threshold();
    out.has_samples = true;
    out.pairs = full.pairs;
    out.upper = full.hi->value;
    out.lower = full.lo->value;
    out.upper_infinite = threshold < out.upper;
    out.lower_infinite = out.lower < -threshold;
    out.upper_witness = full.hi;
    out.lower_witness = full.lo;
    if (halved.pairs > 0) {
        const bool same_upper = out.upper_infinite ? (threshold < halved.hi->value) : (halved.hi->value == out.upper);
        const bool same_lower = out.lower_infinite ? (halved.lo->value < -threshold) : (halved.lo->value == out.lower);
        out.stable_under_halving = same_upper && same_lower;
    }
    return out;
}

std::string_view to_string(DenjoyVerdict v) noexcept {
    switch (v) {
        case DenjoyVerdict::Differentiable: return "DIFFERENTIABLE";
        case DenjoyVerdict::FullOscillation: return "FULL_OSCILLATION";
        case DenjoyVerdict::Neither: return "NEITHER";
        case DenjoyVerdict::Unresolved: return "UNRESOLVED";
    }
    return "UNRESOLVED";
}

DenjoyVerdict classify_denjoy(const PseudoDerivativeEstimate& e, const Rational& tol) {
    if (!e.has_samples) return DenjoyVerdict::Unresolved;
    if (e.upper_infinite && e.lower_infinite) return DenjoyVerdict::FullOscillation;
    if (e.upper_infinite || e.lower_infinite) return DenjoyVerdict::Neither;
    if (e.upper - e.lower <= tol) return DenjoyVerdict::Differentiable;
    // A gap that survives halving the scale is a corner, not coarseness.
    if (e.stable_under_halving) return DenjoyVerdict::Neither;
    return DenjoyVerdict::Unresolved;
}

}  // namespace randlab
