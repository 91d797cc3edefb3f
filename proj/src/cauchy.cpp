#include "randlab/cauchy.hpp"

#include "randlab/errors.hpp"

#include <algorithm>

namespace randlab {

CauchyName::CauchyName(Oracle approx, std::string provenance, std::optional<Rational> exact_value)
    : approx_(std::make_shared<const Oracle>(std::move(approx))),
      provenance_(std::move(provenance)),
      exact_(std::move(exact_value)) {}

RationalInterval CauchyName::window(long n) const {
    if (exact_) return RationalInterval::point(*exact_);
    const Rational centre = approx(n);
    const Rational radius = Rational::pow2(-n);
    return RationalInterval::closed(centre - radius, centre + radius);
}

CauchyName const_name(const Rational& q) {
    return CauchyName([q](long) { return q; }, "const(" + q.to_string() + ")", q);
}

CauchyName scripted_name(std::vector<Rational> values, long bound, std::string provenance) {
    if (values.empty()) throw Error(ErrorKind::InvalidArgument, "scripted name needs at least one value");
    if (bound < 0) throw Error(ErrorKind::InvalidArgument, "scripted name bound must be non-negative");
    auto shared = std::make_shared<const std::vector<Rational>>(std::move(values));
    return CauchyName(
        [shared, bound](long n) {
            const long last = static_cast<long>(shared->size()) - 1;
            return (*shared)[static_cast<std::size_t>(std::clamp(n, 0L, std::min(bound, last)))];
        },
        std::move(provenance));
}

CauchyName newton_sqrt2() {
    return CauchyName(
        [](long n) {
            // Iterates stay above sqrt(2); error = (x^2 - 2) / (x + sqrt 2) < (x^2 - 2) / 2.
            Rational x(3, 2);
            const Rational target = Rational::pow2(-n);
            while (x * x - Rational(2) > target) x = (x + Rational(2) / x) / Rational(2);
            return x;
        },
        "newton_sqrt2");
}

namespace {

std::optional<Rational> both_exact(const CauchyName& x, const CauchyName& y,
                                   Rational (*op)(const Rational&, const Rational&)) {
    if (x.exact_value() && y.exact_value()) return op(*x.exact_value(), *y.exact_value());
    return std::nullopt;
}

}  // namespace

CauchyName add(const CauchyName& x, const CauchyName& y) {
    return CauchyName([x, y](long n) { return x.approx(n + 1) + y.approx(n + 1); },
                      "(" + x.provenance() + " + " + y.provenance() + ")",
                      both_exact(x, y, [](const Rational& a, const Rational& b) { return a + b; }));
}

CauchyName sub(const CauchyName& x, const CauchyName& y) {
    return CauchyName([x, y](long n) { return x.approx(n + 1) - y.approx(n + 1); },
                      "(" + x.provenance() + " - " + y.provenance() + ")",
                      both_exact(x, y, [](const Rational& a, const Rational& b) { return a - b; }));
}

CauchyName negate(const CauchyName& x) {
    std::optional<Rational> e;
    if (x.exact_value()) e = -*x.exact_value();
    return CauchyName([x](long n) { return -x.approx(n); }, "-" + x.provenance(), e);
}

CauchyName mul(const CauchyName& x, const CauchyName& y) {
    // |x| <= |x(0)| + 1, so querying both factors at n + 2 + ceil(log2(1 + |x(0)| + |y(0)|))
    // keeps the product within 2^{-n-1} of the true value.
    const Rational magnitude = Rational(1) + abs(x.approx(0)) + abs(y.approx(0));
    const long shift = 2 + precision_for(Rational(1) / magnitude);  // 2 + ceil(log2(magnitude))
    return CauchyName(
        [x, y, shift](long n) {
            const long p = n + shift;
            return x.approx(p) * y.approx(p);
        },
        "(" + x.provenance() + " * " + y.provenance() + ")",
        both_exact(x, y, [](const Rational& a, const Rational& b) { return a * b; }));
}

std::string_view to_string(Comparison c) noexcept {
    switch (c) {
        case Comparison::Less: return "LESS";
        case Comparison::Greater: return "GREATER";
        case Comparison::Indistinguishable: return "INDISTINGUISHABLE";
    }
    return "INDISTINGUISHABLE";
}

Comparison compare_at(const CauchyName& x, const CauchyName& y, long n) {
    const Rational xn = x.approx(n);
    const Rational yn = y.approx(n);
    const Rational eps = Rational::pow2(-n);
    if (xn + eps < yn - eps) return Comparison::Less;
    if (yn + eps < xn - eps) return Comparison::Greater;
    return Comparison::Indistinguishable;
}

std::optional<ContractViolation> check_contract(const CauchyName& x, long max_index) {
    std::vector<Rational> values;
    values.reserve(static_cast<std::size_t>(max_index + 1));
    for (long n = 0; n <= max_index; ++n) values.push_back(x.approx(n));
    for (long n = 0; n <= max_index; ++n) {
        const Rational bound = Rational::pow2(-n);
        for (long k = n + 1; k <= max_index; ++k) {
            Rational d = abs(values[static_cast<std::size_t>(k)] - values[static_cast<std::size_t>(n)]);
            if (d > bound) return ContractViolation{n, k, std::move(d)};
        }
    }
    return std::nullopt;
}

ModulusFunction::ModulusFunction(Map theta, std::string description)
    : theta_(std::make_shared<const Map>(std::move(theta))), description_(std::move(description)) {}

ModulusFunction ModulusFunction::linear(const Rational& factor) {
    return ModulusFunction([factor](const Rational& eps) { return factor * eps; },
                           "theta(eps) = " + factor.to_string() + " * eps");
}

}  // namespace randlab
