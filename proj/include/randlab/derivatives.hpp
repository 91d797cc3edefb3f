#pragma once

#include "randlab/cauchy.hpp"
#include "randlab/markov.hpp"
#include "randlab/rational.hpp"

#include <optional>
#include <string_view>

namespace randlab {

struct SlopeSample {
    Rational a;
    Rational b;
    Rational value;
};

/// S_f(a,b) = (f(a) - f(b)) / (a - b). Throws Error(DegeneratePair) if a == b.
Rational slope(const MarkovFunction& f, const Rational& a, const Rational& b);

/// Slopes beyond this magnitude are reported as infinite.
inline Rational blowup_threshold() { return Rational::pow2(16); }

/// Finite-scale upper/lower pseudo-derivative.
///
/// upper/lower are the extreme slopes over all grid pairs a <= z <= b with
/// 0 < b - a <= scale. When |slope| crosses the blow-up threshold the
/// corresponding infinity flag is set. `stable_under_halving` records whether
/// the extremes are unchanged at scale/2; a stable finite gap is a corner, an
/// unstable one means the scale is too coarse.
struct PseudoDerivativeEstimate {
    bool has_samples = false;
    Rational upper;
    Rational lower;
    bool upper_infinite = false;
    bool lower_infinite = false;
    Rational scale;
    long grid_exponent = 0;
    long pairs = 0;
    bool stable_under_halving = false;
    std::optional<SlopeSample> upper_witness;
    std::optional<SlopeSample> lower_witness;
};

/// Grid points are j / 2^grid_exponent; grid_exponent <= 14 and
/// scale >= 2^{-grid_exponent-2}.
PseudoDerivativeEstimate pseudo_derivative(const MarkovFunction& f, const CauchyName& z, const Rational& scale,
                                           long grid_exponent);

enum class DenjoyVerdict { Differentiable, FullOscillation, Neither, Unresolved };

std::string_view to_string(DenjoyVerdict v) noexcept;

DenjoyVerdict classify_denjoy(const PseudoDerivativeEstimate& e, const Rational& tol);

}  // namespace randlab
