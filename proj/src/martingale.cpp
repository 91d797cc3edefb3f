#include "randlab/martingale.hpp"

#include "randlab/errors.hpp"

#include <algorithm>

namespace randlab {

namespace {

void require_depth(long depth, long limit) {
    if (depth < 0 || depth > limit) {
        throw Error(ErrorKind::BudgetExceeded,
                    "depth " + std::to_string(depth) + " outside [0," + std::to_string(limit) + "]");
    }
}

unsigned long index_of(std::string_view sigma) {
    unsigned long i = 0;
    for (char c : sigma) i = (i << 1) | (c == '1' ? 1UL : 0UL);
    return i;
}

std::vector<std::vector<Rational>> generate(long depth, const Rational& root, const Rational& left_factor,
                                            const Rational& right_factor) {
    require_depth(depth, Martingale::kMaxDepth);
    std::vector<std::vector<Rational>> levels{{root}};
    for (long n = 1; n <= depth; ++n) {
        const auto& prev = levels.back();
        std::vector<Rational> row(prev.size() * 2);
        for (std::size_t i = 0; i < prev.size(); ++i) {
            row[2 * i] = prev[i] * left_factor;
            row[2 * i + 1] = prev[i] * right_factor;
        }
        levels.push_back(std::move(row));
    }
    return levels;
}

}  // namespace

BitString bits_of(unsigned long i, long n) {
    BitString s(static_cast<std::size_t>(n), '0');
    for (long k = n - 1; k >= 0; --k, i >>= 1) s[static_cast<std::size_t>(k)] = (i & 1UL) ? '1' : '0';
    return s;
}

Martingale::Martingale(std::vector<std::vector<Rational>> levels, std::string name)
    : levels_(std::move(levels)), name_(std::move(name)) {
    if (levels_.empty()) throw Error(ErrorKind::InvalidArgument, "martingale without values");
    require_depth(depth(), kMaxDepth);
    for (std::size_t n = 0; n < levels_.size(); ++n) {
        if (levels_[n].size() != (1UL << n)) {
            throw Error(ErrorKind::InvalidArgument, "martingale level " + std::to_string(n) + " has wrong size");
        }
    }
}

Martingale Martingale::constant(const Rational& c, long depth) {
    return {generate(depth, c, Rational(1), Rational(1)), "constant"};
}

Martingale Martingale::all_in_on_0(long depth) {
    return {generate(depth, Rational(1), Rational(2), Rational(0)), "all_in_on_0"};
}

Martingale Martingale::split_bet(const Rational& p, long depth) {
    if (p.sign() < 0 || p > Rational(1)) throw Error(ErrorKind::InvalidArgument, "split_bet needs p in [0,1]");
    return {generate(depth, Rational(1), p * Rational(2), (Rational(1) - p) * Rational(2)),
            "split_bet(" + p.to_string() + ")"};
}

Martingale Martingale::from_rule(std::string_view rule, long depth) {
    if (rule == "constant") return constant(Rational(1), depth);
    if (rule == "all_in_on_0") return all_in_on_0(depth);
    constexpr std::string_view prefix = "split_bet(";
    if (rule.starts_with(prefix) && rule.ends_with(")")) {
        return split_bet(Rational::parse(rule.substr(prefix.size(), rule.size() - prefix.size() - 1)), depth);
    }
    throw Error(ErrorKind::ParseError, "unknown martingale rule \"" + std::string(rule) + "\"");
}

Martingale Martingale::from_table(const std::map<BitString, Rational>& table, std::string name) {
    long depth = -1;
    for (const auto& [s, v] : table) {
        require_bits(s);
        depth = std::max(depth, static_cast<long>(s.size()));
    }
    if (depth < 0) throw Error(ErrorKind::FixtureInvalid, "empty martingale table");
    std::vector<std::vector<Rational>> levels;
    for (long n = 0; n <= depth; ++n) {
        std::vector<Rational> row(1UL << n);
        for (unsigned long i = 0; i < row.size(); ++i) {
            const auto key = bits_of(i, n);
            auto it = table.find(key);
            if (it == table.end()) {
                throw Error(ErrorKind::FixtureInvalid, "martingale table misses string \"" + key + "\"");
            }
            row[i] = it->second;
        }
        levels.push_back(std::move(row));
    }
    return {std::move(levels), std::move(name)};
}

const Rational& Martingale::value(std::string_view sigma) const {
    require_bits(sigma);
    if (static_cast<long>(sigma.size()) > depth()) {
        throw Error(ErrorKind::BudgetExceeded, "string of length " + std::to_string(sigma.size()) +
                                                   " beyond martingale depth " + std::to_string(depth()));
    }
    return levels_[sigma.size()][index_of(sigma)];
}

CheckReport check_fairness(const Martingale& m, long depth) {
    require_depth(depth, Martingale::kMaxDepth);
    CheckReport report;
    const long limit = std::min(depth, m.depth() - 1);
    const auto& lv = m.levels();
    for (long n = 0; n <= limit; ++n) {
        for (unsigned long i = 0; i < lv[n].size(); ++i) {
            const Rational lhs = lv[n][i] * Rational(2);
            const Rational rhs = lv[n + 1][2 * i] + lv[n + 1][2 * i + 1];
            if (lhs != rhs) {
                const auto sigma = bits_of(i, n);
                report.add({"fairness", false,
                            "2M(\"" + sigma + "\") = " + lhs.to_string() + " != " + rhs.to_string(),
                            {{"sigma", sigma},
                             {"M(sigma)", lv[n][i].to_string()},
                             {"M(sigma0)", lv[n + 1][2 * i].to_string()},
                             {"M(sigma1)", lv[n + 1][2 * i + 1].to_string()}}});
                return report;
            }
        }
    }
    report.add({"fairness", true, "", {{"depth", std::to_string(std::max(limit + 1, 0L))}}});
    return report;
}

CheckReport check_level_sums(const Martingale& m, long depth) {
    require_depth(depth, Martingale::kMaxDepth);
    CheckReport report;
    const auto& lv = m.levels();
    for (long n = 0; n <= std::min(depth, m.depth()); ++n) {
        Rational sum;
        for (const auto& v : lv[n]) sum += v;
        const Rational target = Rational::pow2(n) * m.initial_capital();
        const bool ok = sum == target;
        report.add({"level_sum[n=" + std::to_string(n) + "]", ok,
                    ok ? "" : "level sum " + sum.to_string() + " != " + target.to_string(),
                    {{"sum", sum.to_string()}, {"target", target.to_string()}}});
    }
    return report;
}

CheckReport check_nonnegative(const Martingale& m, long depth) {
    CheckReport report;
    const auto& lv = m.levels();
    for (long n = 0; n <= std::min(depth, m.depth()); ++n) {
        for (unsigned long i = 0; i < lv[n].size(); ++i) {
            if (lv[n][i].sign() < 0) {
                report.add({"nonnegative", false, "negative capital", {{"sigma", bits_of(i, n)}, {"value", lv[n][i].to_string()}}});
                return report;
            }
        }
    }
    report.add({"nonnegative", true, "", {}});
    return report;
}

CapitalTrace capital_trace(const Martingale& m, std::string_view prefix) {
    require_bits(prefix);
    CapitalTrace t;
    for (std::size_t n = 0; n <= prefix.size(); ++n) {
        t.capital.push_back(m.value(prefix.substr(0, n)));
        t.running_max.push_back(n == 0 ? t.capital.back() : max(t.running_max.back(), t.capital.back()));
    }
    return t;
}

std::optional<SavingsViolation> find_savings_violation(const Martingale& m, long depth) {
    require_depth(depth, Martingale::kMaxDepth);
    const long d = std::min(depth, m.depth());
    const auto& lv = m.levels();
    // Subtree minima, so only violating sigma trigger the descendant scan.
    std::vector<std::vector<Rational>> low(static_cast<std::size_t>(d + 1));
    low[d] = lv[d];
    for (long n = d - 1; n >= 0; --n) {
        low[n].resize(lv[n].size());
        for (unsigned long i = 0; i < lv[n].size(); ++i) {
            low[n][i] = min(lv[n][i], min(low[n + 1][2 * i], low[n + 1][2 * i + 1]));
        }
    }
    const Rational two(2);
    for (long n = 0; n <= d; ++n) {
        for (unsigned long i = 0; i < lv[n].size(); ++i) {
            const Rational floor_value = lv[n][i] - two;
            if (!(low[n][i] < floor_value)) continue;
            for (long k = n + 1; k <= d; ++k) {
                const unsigned long width = 1UL << (k - n);
                for (unsigned long j = i * width; j < (i + 1) * width; ++j) {
                    if (lv[k][j] < floor_value) {
                        return SavingsViolation{bits_of(i, n), bits_of(j, k), lv[n][i] - lv[k][j]};
                    }
                }
            }
        }
    }
    return std::nullopt;
}

SavingsResult savings_transform(const Martingale& m, long depth) {
    require_depth(depth, Martingale::kMaxDepth);
    if (depth > m.depth()) {
        throw Error(ErrorKind::BudgetExceeded, "transform depth beyond martingale depth " + std::to_string(m.depth()));
    }
    if (m.initial_capital().sign() <= 0) {
        throw Error(ErrorKind::InvalidArgument, "savings transform needs positive initial capital");
    }
    if (const auto* bad = check_fairness(m, depth).first_failure()) {
        throw Error(ErrorKind::InvariantViolation, "savings transform on unfair martingale: " + bad->detail);
    }

    const auto& lv = m.levels();
    const Rational two(2);
    long banks = 0;
    auto settle = [&](Rational& work, Rational& bank) {
        while (work >= two) {
            work /= two;
            bank += work;
            ++banks;
        }
    };

    std::vector<std::vector<Rational>> work(static_cast<std::size_t>(depth + 1));
    std::vector<std::vector<Rational>> bank(static_cast<std::size_t>(depth + 1));
    work[0] = {m.initial_capital()};
    bank[0] = {Rational(0)};
    settle(work[0][0], bank[0][0]);
    for (long n = 1; n <= depth; ++n) {
        work[n].resize(lv[n].size());
        bank[n].resize(lv[n].size());
        for (unsigned long j = 0; j < lv[n].size(); ++j) {
            const unsigned long parent = j >> 1;
            bank[n][j] = bank[n - 1][parent];
            const Rational& before = lv[n - 1][parent];
            work[n][j] = before.is_zero() ? Rational(0) : work[n - 1][parent] * lv[n][j] / before;
            settle(work[n][j], bank[n][j]);
        }
    }

    std::vector<std::vector<Rational>> out(static_cast<std::size_t>(depth + 1));
    for (long n = 0; n <= depth; ++n) {
        out[n].resize(lv[n].size());
        for (unsigned long j = 0; j < lv[n].size(); ++j) out[n][j] = work[n][j] + bank[n][j];
    }

    // Achieved growth relation, c = 1.
    std::optional<Rational> constant;
    std::vector<std::vector<std::pair<Rational, Rational>>> runmax(static_cast<std::size_t>(depth + 1));
    for (long n = 0; n <= depth; ++n) {
        runmax[n].resize(lv[n].size());
        for (unsigned long j = 0; j < lv[n].size(); ++j) {
            if (n == 0) {
                runmax[n][j] = {lv[n][j], out[n][j]};
            } else {
                const auto& p = runmax[n - 1][j >> 1];
                runmax[n][j] = {max(p.first, lv[n][j]), max(p.second, out[n][j])};
            }
            const Rational gap = Rational(floor_log2(runmax[n][j].first / m.initial_capital())) - runmax[n][j].second;
            if (!constant || gap > *constant) constant = gap;
        }
    }

    return SavingsResult{Martingale(std::move(out), "savings(" + m.name() + ")"), Rational(1), *constant, banks};
}

}  // namespace randlab
