#include "randlab/tt_measures.hpp"

#include "randlab/errors.hpp"
#include "randlab/martingale.hpp"

#include <algorithm>

namespace randlab {

namespace {

std::vector<long> linear_use(long outputs, long slope, long offset) {
    if (outputs < 0) throw Error(ErrorKind::InvalidArgument, "negative output count");
    std::vector<long> use(static_cast<std::size_t>(outputs));
    for (long n = 0; n < outputs; ++n) use[static_cast<std::size_t>(n)] = slope * n + offset;
    return use;
}

void require_monotone_use(const std::vector<long>& use) {
    for (std::size_t n = 0; n < use.size(); ++n) {
        if (use[n] < 0 || use[n] > 62) throw Error(ErrorKind::InvalidArgument, "use bound outside [0,62]");
        if (n > 0 && use[n] < use[n - 1]) {
            throw Error(ErrorKind::InvalidArgument, "use bound decreases at n = " + std::to_string(n));
        }
    }
}

std::uint64_t pack(std::string_view bits, long length) {
    std::uint64_t v = 0;
    for (long i = 0; i < length; ++i) v = (v << 1) | (bits[static_cast<std::size_t>(i)] == '1' ? 1U : 0U);
    return v;
}

}  // namespace

TTFunctional::TTFunctional(Rule rule, std::vector<long> use, std::string name)
    : rule_(rule), use_(std::move(use)), name_(std::move(name)) {
    require_monotone_use(use_);
}

TTFunctional TTFunctional::identity(long outputs) { return {Rule::Identity, linear_use(outputs, 1, 1), "identity"}; }

TTFunctional TTFunctional::pairwise_or(long outputs) {
    return {Rule::PairwiseOr, linear_use(outputs, 2, 2), "pairwise_or"};
}

TTFunctional TTFunctional::bit_flip(long outputs) { return {Rule::BitFlip, linear_use(outputs, 1, 1), "bit_flip"}; }

TTFunctional TTFunctional::table(std::vector<long> use, std::vector<std::string> tables, std::string name) {
    if (use.size() != tables.size()) throw Error(ErrorKind::FixtureInvalid, "one table per use bound required");
    for (std::size_t n = 0; n < use.size(); ++n) {
        if (use[n] > kMaxEnumeratedUse) throw Error(ErrorKind::BudgetExceeded, "table use bound above 24");
        if (use[n] < 0 || tables[n].size() != (1UL << use[n])) {
            throw Error(ErrorKind::FixtureInvalid, "table " + std::to_string(n) + " must have 2^u(n) entries");
        }
        require_bits(tables[n]);
    }
    TTFunctional f(Rule::Table, std::move(use), std::move(name));
    f.tables_ = std::make_shared<const std::vector<std::string>>(std::move(tables));
    return f;
}

TTFunctional TTFunctional::custom(std::vector<long> use, BitRule rule, std::string name) {
    TTFunctional f(Rule::Custom, std::move(use), std::move(name));
    f.custom_ = std::make_shared<const BitRule>(std::move(rule));
    return f;
}

TTFunctional TTFunctional::from_rule(std::string_view rule, long outputs) {
    if (rule == "identity") return identity(outputs);
    if (rule == "pairwise_or") return pairwise_or(outputs);
    if (rule == "bit_flip") return bit_flip(outputs);
    throw Error(ErrorKind::ParseError, "unknown functional rule \"" + std::string(rule) + "\"");
}

long TTFunctional::use(long n) const {
    if (n < 0 || n >= outputs()) {
        throw Error(ErrorKind::BudgetExceeded, "output position " + std::to_string(n) + " not materialized");
    }
    return use_[static_cast<std::size_t>(n)];
}

int TTFunctional::bit(long n, std::uint64_t block, long length) const {
    const long u = use(n);
    if (length < u) throw Error(ErrorKind::InvalidArgument, "block shorter than use bound");
    const std::uint64_t sub = u == 0 ? 0 : block >> (length - u);
    switch (rule_) {
        case Rule::Identity: return static_cast<int>(sub & 1U);
        case Rule::PairwiseOr: return (sub & 3U) != 0 ? 1 : 0;
        case Rule::BitFlip: return static_cast<int>(1U - (sub & 1U));
        case Rule::Table: return (*tables_)[static_cast<std::size_t>(n)][sub] == '1' ? 1 : 0;
        case Rule::Custom: return (*custom_)(n, bits_of(sub, u));
    }
    return 0;
}

int TTFunctional::bit(long n, std::string_view block) const {
    const long u = use(n);
    if (static_cast<long>(block.size()) < u) throw Error(ErrorKind::InvalidArgument, "block shorter than use bound");
    require_bits(block.substr(0, static_cast<std::size_t>(u)));
    if (rule_ == Rule::Custom) return (*custom_)(n, block.substr(0, static_cast<std::size_t>(u)));
    return bit(n, pack(block, u), u);
}

BitString TTFunctional::apply(std::string_view input) const {
    BitString out;
    for (long n = 0; n < outputs() && use(n) <= static_cast<long>(input.size()); ++n) {
        out.push_back(bit(n, input) ? '1' : '0');
    }
    return out;
}

Rational induced_measure(const TTFunctional& phi, std::string_view sigma) {
    require_bits(sigma);
    const long len = static_cast<long>(sigma.size());
    if (len == 0) return Rational(1);
    if (len > phi.outputs()) {
        throw Error(ErrorKind::BudgetExceeded, "|sigma| = " + std::to_string(len) + " beyond materialized outputs");
    }
    const long u = phi.use(len - 1);
    if (u > kMaxEnumeratedUse) {
        throw Error(ErrorKind::BudgetExceeded, "use bound " + std::to_string(u) + " exceeds enumeration budget 24");
    }
    unsigned long count = 0;
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << u); ++b) {
        bool match = true;
        for (long n = 0; n < len && match; ++n) match = phi.bit(n, b, u) == (sigma[static_cast<std::size_t>(n)] - '0');
        count += match ? 1 : 0;
    }
    return Rational(mpz_class(count), mpz_class(1)) * Rational::pow2(-u);
}

CylinderMeasure::CylinderMeasure(Kind kind, std::string name, long budget)
    : kind_(kind), name_(std::move(name)), budget_(budget) {}

CylinderMeasure CylinderMeasure::uniform() { return {Kind::Uniform, "uniform", kSymbolicBudget}; }

CylinderMeasure CylinderMeasure::bernoulli(const Rational& p) {
    if (p.sign() < 0 || p > Rational(1)) throw Error(ErrorKind::InvalidArgument, "bernoulli needs p in [0,1]");
    CylinderMeasure mu(Kind::Bernoulli, "bernoulli(" + p.to_string() + ")", kSymbolicBudget);
    mu.p_ = p;
    return mu;
}

CylinderMeasure CylinderMeasure::from_table(std::map<BitString, Rational> table, std::string name) {
    long budget = -1;
    for (const auto& [s, v] : table) {
        require_bits(s);
        budget = std::max(budget, static_cast<long>(s.size()));
    }
    if (budget < 0) throw Error(ErrorKind::FixtureInvalid, "empty measure table");
    CylinderMeasure mu(Kind::Table, std::move(name), budget);
    mu.table_ = std::make_shared<const std::map<BitString, Rational>>(std::move(table));
    return mu;
}

CylinderMeasure CylinderMeasure::induced(const TTFunctional& phi, long depth) {
    if (depth < 0 || depth > phi.outputs()) throw Error(ErrorKind::BudgetExceeded, "depth beyond materialized outputs");
    if (depth > 0 && phi.use(depth - 1) > kMaxEnumeratedUse) {
        throw Error(ErrorKind::BudgetExceeded, "use bound exceeds enumeration budget 24");
    }
    std::map<BitString, Rational> table{{"", Rational(1)}};
    for (long n = 1; n <= depth; ++n) {
        const long u = phi.use(n - 1);
        std::vector<unsigned long> counts(1UL << n, 0);
        for (std::uint64_t b = 0; b < (std::uint64_t{1} << u); ++b) {
            unsigned long out = 0;
            for (long k = 0; k < n; ++k) out = (out << 1) | static_cast<unsigned long>(phi.bit(k, b, u));
            ++counts[out];
        }
        for (unsigned long i = 0; i < counts.size(); ++i) {
            table[bits_of(i, n)] = Rational(mpz_class(counts[i]), mpz_class(1)) * Rational::pow2(-u);
        }
    }
    return from_table(std::move(table), "lambda_" + phi.name());
}

Rational CylinderMeasure::mass(std::string_view sigma) const {
    require_bits(sigma);
    if (static_cast<long>(sigma.size()) > budget_) {
        throw Error(ErrorKind::BudgetExceeded, "cylinder of length " + std::to_string(sigma.size()) +
                                                   " beyond measure budget " + std::to_string(budget_));
    }
    switch (kind_) {
        case Kind::Uniform: return Rational::pow2(-static_cast<long>(sigma.size()));
        case Kind::Bernoulli: {
            Rational m(1);
            const Rational q = Rational(1) - p_;
            for (char c : sigma) m *= (c == '1' ? p_ : q);
            return m;
        }
        case Kind::Table: {
            auto it = table_->find(BitString(sigma));
            if (it == table_->end()) {
                throw Error(ErrorKind::FixtureInvalid, "measure table misses \"" + std::string(sigma) + "\"");
            }
            return it->second;
        }
    }
    return Rational(0);
}

CheckReport validate_measure(const CylinderMeasure& mu, long depth) {
    CheckReport report;
    const long d = std::min(depth, mu.budget());
    if (d > 20) throw Error(ErrorKind::BudgetExceeded, "measure validation depth above 20");
    const Rational root = mu.mass("");
    report.add({"unit_mass", root == Rational(1), root == Rational(1) ? "" : "mass(empty) != 1",
                {{"mass", root.to_string()}}});

    std::optional<CheckRecord> range_fail;
    for (long n = 0; n <= d && !range_fail; ++n) {
        for (unsigned long i = 0; i < (1UL << n); ++i) {
            const auto s = bits_of(i, n);
            const Rational m = mu.mass(s);
            if (m.sign() < 0 || m > Rational(1)) {
                range_fail = CheckRecord{"range", false, "mass outside [0,1]", {{"sigma", s}, {"mass", m.to_string()}}};
                break;
            }
        }
    }
    report.add(range_fail ? *range_fail : CheckRecord{"range", true, "", {}});

    for (long n = 0; n < d; ++n) {
        for (unsigned long i = 0; i < (1UL << n); ++i) {
            const auto s = bits_of(i, n);
            const Rational m = mu.mass(s);
            const Rational m0 = mu.mass(s + "0");
            const Rational m1 = mu.mass(s + "1");
            if (m != m0 + m1) {
                report.add({"additivity", false,
                            "mass(\"" + s + "\") = " + m.to_string() + " != " + (m0 + m1).to_string(),
                            {{"sigma", s}, {"mass", m.to_string()}, {"mass0", m0.to_string()}, {"mass1", m1.to_string()}}});
                return report;
            }
        }
    }
    report.add({"additivity", true, "", {{"depth", std::to_string(d)}}});
    return report;
}

Rational cdf(const CylinderMeasure& mu, const Rational& d) {
    if (d.sign() < 0 || d > Rational(1)) throw Error(ErrorKind::InvalidArgument, "cdf argument outside [0,1]");
    if (d == Rational(1)) return mu.mass("");
    const mpz_class den = d.denominator();
    if (mpz_popcount(den.get_mpz_t()) != 1) throw Error(ErrorKind::InvalidArgument, "cdf argument not dyadic");
    const long n = static_cast<long>(mpz_sizeinbase(den.get_mpz_t(), 2)) - 1;
    if (n > mu.budget()) throw Error(ErrorKind::BudgetExceeded, "cdf argument finer than measure budget");
    const auto bits = bits_of(d.numerator().get_ui(), n);
    Rational g;
    for (long i = 0; i < n; ++i) {
        if (bits[static_cast<std::size_t>(i)] == '1') g += mu.mass(bits.substr(0, static_cast<std::size_t>(i)) + "0");
    }
    return g;
}

std::string_view to_string(TransportStatus s) noexcept {
    return s == TransportStatus::Complete ? "COMPLETE" : "NEED_MORE_INPUT";
}

namespace {

void check_for_atoms(const CylinderMeasure& mu, std::string_view a) {
    const long room = std::min<long>(8, mu.budget() - static_cast<long>(a.size()));
    for (char side : {'0', '1'}) {
        BitString s(a);
        Rational prev = mu.mass(s);
        long flat = 0;
        for (long k = 0; k < room; ++k) {
            s.push_back(side);
            const Rational next = mu.mass(s);
            flat = (next == prev && next.sign() > 0) ? flat + 1 : 0;
            if (flat >= 3) {
                throw Error(ErrorKind::AtomSuspected,
                            "mass " + next.to_string() + " does not shrink along \"" + s + "\"");
            }
            prev = next;
        }
    }
}

bool is_prefix(std::string_view p, std::string_view s) { return p.size() <= s.size() && s.substr(0, p.size()) == p; }

}  // namespace

TransportResult transport(const CylinderMeasure& mu, std::string_view a_prefix, long want) {
    require_bits(a_prefix);
    if (want < 0) want = static_cast<long>(a_prefix.size());
    const Rational m = mu.mass(a_prefix);
    if (m.is_zero()) throw Error(ErrorKind::ZeroMassCylinder, "cylinder \"" + std::string(a_prefix) + "\" has mass 0");
    check_for_atoms(mu, a_prefix);

    const Rational lo = cdf(mu, dyadic_value(a_prefix));
    const Rational hi = lo + m;
    BitString c;
    Rational cell_lo(0);
    for (long k = 1;; ++k) {
        const Rational width = Rational::pow2(-k);
        const Rational mid = cell_lo + width;
        if (hi <= mid) {
            c.push_back('0');
        } else if (lo >= mid) {
            c.push_back('1');
            cell_lo = mid;
        } else {
            break;
        }
    }
    const auto status = static_cast<long>(c.size()) < want ? TransportStatus::NeedMoreInput : TransportStatus::Complete;
    return {std::move(c), RationalInterval::half_open(lo, hi), status};
}

CheckReport transport_order_check(const CylinderMeasure& mu, long depth) {
    if (depth < 0 || depth > 12) throw Error(ErrorKind::BudgetExceeded, "transport order check depth above 12");
    std::vector<BitString> inputs;
    std::vector<BitString> outputs;
    for (long n = 0; n <= depth; ++n) {
        for (unsigned long i = 0; i < (1UL << n); ++i) {
            inputs.push_back(bits_of(i, n));
            outputs.push_back(transport(mu, inputs.back()).c_prefix);
        }
    }
    CheckReport report;
    // Index of a string in `inputs`: 2^n - 1 + value.
    auto slot = [](std::string_view s) {
        unsigned long v = 0;
        for (char ch : s) v = (v << 1) | (ch == '1' ? 1UL : 0UL);
        return (1UL << s.size()) - 1 + v;
    };
    std::optional<CheckRecord> coherence_fail;
    for (std::size_t i = 0; i < inputs.size() && !coherence_fail; ++i) {
        if (static_cast<long>(inputs[i].size()) == depth) continue;
        for (char b : {'0', '1'}) {
            const auto& child = outputs[slot(inputs[i] + b)];
            if (!is_prefix(outputs[i], child)) {
                coherence_fail = CheckRecord{"prefix_coherence", false, "extension contradicts emitted bits",
                                             {{"a", inputs[i]}, {"c", outputs[i]}, {"a_ext", inputs[i] + b}, {"c_ext", child}}};
                break;
            }
        }
    }
    report.add(coherence_fail ? *coherence_fail : CheckRecord{"prefix_coherence", true, "", {}});

    for (std::size_t i = 0; i < inputs.size(); ++i) {
        for (std::size_t j = 0; j < inputs.size(); ++j) {
            const auto& a1 = inputs[i];
            const auto& a2 = inputs[j];
            if (!(a1 < a2) || is_prefix(a1, a2)) continue;
            const auto& c1 = outputs[i];
            const auto& c2 = outputs[j];
            if (is_prefix(c1, c2) || is_prefix(c2, c1)) continue;
            const auto diff = std::mismatch(c1.begin(), c1.end(), c2.begin()).first - c1.begin();
            if (c1[static_cast<std::size_t>(diff)] == '1') {
                report.add({"monotonicity", false, "order of transported prefixes reversed",
                            {{"a1", a1}, {"c1", c1}, {"a2", a2}, {"c2", c2}}});
                return report;
            }
        }
    }
    report.add({"monotonicity", true, "", {{"inputs", std::to_string(inputs.size())}}});
    return report;
}

PushforwardReport transport_pushforward_check(const CylinderMeasure& mu, std::string_view tau, long depth) {
    require_bits(tau);
    if (depth < static_cast<long>(tau.size()) + 4) throw Error(ErrorKind::InvalidArgument, "need depth >= |tau| + 4");
    if (depth > 16) throw Error(ErrorKind::BudgetExceeded, "pushforward depth above 16");
    PushforwardReport r{Rational(0), Rational::pow2(-static_cast<long>(tau.size())), Rational(0), false};
    for (unsigned long i = 0; i < (1UL << depth); ++i) {
        const auto a = bits_of(i, depth);
        const Rational m = mu.mass(a);
        if (m.is_zero()) continue;
        const auto c = transport(mu, a).c_prefix;
        if (is_prefix(tau, c)) {
            r.sum += m;
        } else if (is_prefix(c, tau)) {
            r.residual += m;
        }
    }
    r.pass = abs(r.sum - r.target) <= r.residual;
    return r;
}

TTFunctional tt_from_ucf(const MarkovFunction& g, long depth) {
    if (!g.modulus()) throw Error(ErrorKind::InvalidArgument, "tt_from_ucf needs a declared modulus");
    if (depth < 0 || depth > 40) throw Error(ErrorKind::BudgetExceeded, "tt_from_ucf depth outside [0,40]");
    const auto theta = *g.modulus();
    std::vector<long> use;
    for (long n = 0; n < depth; ++n) {
        long u = precision_for(theta(Rational::pow2(-n - 2)));
        if (!use.empty()) u = std::max(u, use.back());
        use.push_back(u);
    }
    auto rule = [g](long n, std::string_view block) {
        const Rational x0 = dyadic_value(block);
        const Rational x1 = x0 + Rational::pow2(-static_cast<long>(block.size()));
        Rational glo = g.hull(x0, x1).first;
        glo = max(Rational(0), min(Rational(1), glo));
        // Round down: the level-(n+1) cell holding the left end of the hull.
        const Rational scaled = glo * Rational::pow2(n + 1);
        mpz_class cell = scaled.floor();
        const mpz_class top = mpz_class(1) << static_cast<mp_bitcnt_t>(n + 1);
        if (cell >= top) cell = top - 1;
        return mpz_odd_p(cell.get_mpz_t()) ? 1 : 0;
    };
    return TTFunctional::custom(std::move(use), rule, "tt(" + g.name() + ")");
}

}  // namespace randlab
