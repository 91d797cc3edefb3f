#include "randlab/rational.hpp"

#include "randlab/errors.hpp"

#include <cctype>

namespace randlab {

namespace {

bool is_integer_literal(std::string_view s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    return true;
}

mpz_class parse_integer(std::string_view s) {
    if (!s.empty() && s[0] == '+') s.remove_prefix(1);
    return mpz_class(std::string(s), 10);
}

}  // namespace

Rational::Rational(const mpz_class& num, const mpz_class& den) : v_(num, den) {
    if (den == 0) throw Error(ErrorKind::InvalidArgument, "zero denominator");
    v_.canonicalize();
}

Rational::Rational(long num, long den) : Rational(mpz_class(num), mpz_class(den)) {}

Rational::Rational(mpq_class value) : v_(std::move(value)) { v_.canonicalize(); }

Rational Rational::parse(std::string_view text) {
    const auto slash = text.find('/');
    const auto num = text.substr(0, slash);
    if (!is_integer_literal(num)) {
        throw Error(ErrorKind::ParseError, "not a rational: \"" + std::string(text) + "\"");
    }
    if (slash == std::string_view::npos) return Rational(parse_integer(num), mpz_class(1));
    const auto den = text.substr(slash + 1);
    if (!is_integer_literal(den) || den[0] == '-' || den[0] == '+') {
        throw Error(ErrorKind::ParseError, "not a rational: \"" + std::string(text) + "\"");
    }
    const mpz_class d = parse_integer(den);
    if (d == 0) throw Error(ErrorKind::ParseError, "zero denominator in \"" + std::string(text) + "\"");
    return Rational(parse_integer(num), d);
}

Rational Rational::pow2(long exponent) {
    mpz_class p = 1;
    if (exponent >= 0) {
        mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<mp_bitcnt_t>(exponent));
        return Rational(p, mpz_class(1));
    }
    mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<mp_bitcnt_t>(-exponent));
    return Rational(mpz_class(1), p);
}

mpz_class Rational::floor() const {
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), v_.get_num_mpz_t(), v_.get_den_mpz_t());
    return q;
}

mpz_class Rational::ceil() const {
    mpz_class q;
    mpz_cdiv_q(q.get_mpz_t(), v_.get_num_mpz_t(), v_.get_den_mpz_t());
    return q;
}

std::string Rational::to_string() const {
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

Rational& Rational::operator+=(const Rational& o) {
    v_ += o.v_;
    return *this;
}

Rational& Rational::operator-=(const Rational& o) {
    v_ -= o.v_;
    return *this;
}

Rational& Rational::operator*=(const Rational& o) {
    v_ *= o.v_;
    return *this;
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.is_zero()) throw Error(ErrorKind::InvalidArgument, "division by zero");
    v_ /= o.v_;
    return *this;
}

Rational abs(const Rational& x) { return x.sign() < 0 ? -x : x; }

const Rational& min(const Rational& a, const Rational& b) { return b < a ? b : a; }

const Rational& max(const Rational& a, const Rational& b) { return a < b ? b : a; }

long precision_for(const Rational& x) {
    if (x.sign() <= 0) throw Error(ErrorKind::InvalidArgument, "precision_for needs a positive rational");
    long k = 0;
    // 2^{-k} <= x  <=>  1 <= x * 2^k
    if (x >= Rational(1)) return 0;
    k = -floor_log2(x);
    while (Rational::pow2(-k) > x) ++k;
    return k;
}

long floor_log2(const Rational& x) {
    if (x.sign() <= 0) throw Error(ErrorKind::InvalidArgument, "floor_log2 needs a positive rational");
    const long num_bits = static_cast<long>(mpz_sizeinbase(x.numerator().get_mpz_t(), 2));
    const long den_bits = static_cast<long>(mpz_sizeinbase(x.denominator().get_mpz_t(), 2));
    long k = num_bits - den_bits;  // within one of the answer
    while (Rational::pow2(k) > x) --k;
    while (Rational::pow2(k + 1) <= x) ++k;
    return k;
}

}  // namespace randlab
