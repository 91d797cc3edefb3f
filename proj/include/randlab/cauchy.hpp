#pragma once

#include "randlab/interval.hpp"
#include "randlab/rational.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace randlab {

/// A computable real presented as an approximation oracle.
///
/// Contract: |approx(k) - approx(n)| <= 2^{-n} for all k >= n. The oracle must
/// be pure. A name built from a known rational is flagged exact; its certified
/// window is then the point itself rather than a 2^{-n} neighbourhood.
class CauchyName {
public:
    using Oracle = std::function<Rational(long)>;

    CauchyName(Oracle approx, std::string provenance, std::optional<Rational> exact_value = std::nullopt);

    Rational approx(long n) const { return (*approx_)(n); }
    const std::string& provenance() const { return provenance_; }
    const std::optional<Rational>& exact_value() const { return exact_; }

    /// Closed interval guaranteed to contain the named real, of radius 2^{-n}
    /// (or the exact point for constant names).
    RationalInterval window(long n) const;

private:
    std::shared_ptr<const Oracle> approx_;
    std::string provenance_;
    std::optional<Rational> exact_;
};

CauchyName const_name(const Rational& q);

/// approx(n) = values[min(n, bound, size-1)]. Throws Error(InvalidArgument)
/// on an empty list.
CauchyName scripted_name(std::vector<Rational> values, long bound, std::string provenance = "scripted");

/// Newton iterates for sqrt(2), refined until the certified error is below 2^{-n-1}.
CauchyName newton_sqrt2();

CauchyName add(const CauchyName& x, const CauchyName& y);
CauchyName sub(const CauchyName& x, const CauchyName& y);
CauchyName mul(const CauchyName& x, const CauchyName& y);
CauchyName negate(const CauchyName& x);

enum class Comparison { Less, Greater, Indistinguishable };

std::string_view to_string(Comparison c) noexcept;

/// Decides x < y or x > y only when the 2^{-n} windows are separated.
Comparison compare_at(const CauchyName& x, const CauchyName& y, long n);

/// First (n, k) pair with k >= n, both <= max_index, violating the contract.
struct ContractViolation {
    long n;
    long k;
    Rational distance;
};
std::optional<ContractViolation> check_contract(const CauchyName& x, long max_index);

/// Modulus of uniform continuity: |x - y| <= theta(eps) implies |f(x) - f(y)| <= eps.
class ModulusFunction {
public:
    using Map = std::function<Rational(const Rational&)>;

    ModulusFunction(Map theta, std::string description);

    /// theta(eps) = factor * eps.
    static ModulusFunction linear(const Rational& factor);

    Rational operator()(const Rational& eps) const { return (*theta_)(eps); }
    const std::string& description() const { return description_; }

private:
    std::shared_ptr<const Map> theta_;
    std::string description_;
};

}  // namespace randlab
