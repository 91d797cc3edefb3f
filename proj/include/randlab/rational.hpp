#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace randlab {

/// Exact rational number in lowest terms with a positive denominator.
///
/// Thin value wrapper over GMP's mpq_class. Every constructor canonicalizes,
/// so two equal rationals always have identical numerator/denominator and
/// identical string forms.
class Rational {
public:
    Rational() = default;
    Rational(long value) : v_(value) {}  // NOLINT(google-explicit-constructor)
    Rational(int value) : v_(static_cast<long>(value)) {}  // NOLINT(google-explicit-constructor)
    Rational(const mpz_class& num, const mpz_class& den);
    Rational(long num, long den);
    explicit Rational(mpq_class value);

    /// Parses "p/q" or "p" (optionally signed). Throws Error(ParseError).
    static Rational parse(std::string_view text);

    /// 2^exponent for any integer exponent.
    static Rational pow2(long exponent);

    mpz_class numerator() const { return v_.get_num(); }
    mpz_class denominator() const { return v_.get_den(); }
    const mpq_class& raw() const { return v_; }

    int sign() const { return sgn(v_); }
    bool is_zero() const { return sgn(v_) == 0; }
    bool is_integer() const { return v_.get_den() == 1; }

    /// floor(this) as an integer.
    mpz_class floor() const;
    /// ceil(this) as an integer.
    mpz_class ceil() const;

    /// Always "p/q", including "0/1" and "3/1".
    std::string to_string() const;
    double to_double() const { return v_.get_d(); }

    Rational operator-() const { return Rational(mpq_class(-v_)); }
    Rational& operator+=(const Rational& o);
    Rational& operator-=(const Rational& o);
    Rational& operator*=(const Rational& o);
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        const int c = cmp(a.v_, b.v_);
        return c < 0 ? std::strong_ordering::less
             : c > 0 ? std::strong_ordering::greater
                     : std::strong_ordering::equal;
    }

private:
    mpq_class v_;
};

Rational abs(const Rational& x);
const Rational& min(const Rational& a, const Rational& b);
const Rational& max(const Rational& a, const Rational& b);

/// Least k >= 0 with 2^{-k} <= x, for 0 < x. Used to turn a rational
/// tolerance into a precision index.
long precision_for(const Rational& x);

/// floor(log2(x)) for x > 0.
long floor_log2(const Rational& x);

}  // namespace randlab
