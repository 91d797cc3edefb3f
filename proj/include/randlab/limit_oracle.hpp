#pragma once

#include "randlab/errors.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace randlab {

/// Stage-wise approximation of a limit-computable map x -> V, standing in for
/// a finite amount of 0'-computation (Limit Lemma). The script for query x
/// lists the approximation at stages 0, 1, ...; the last entry repeats. With
/// budgets present the map is omega-c.e.: the number of mind changes of x may
/// not exceed budget(x). Construction rejects scripts that break the budget.
template <class V>
class LimitOracle {
public:
    LimitOracle(std::map<long, std::vector<V>> scripts, std::map<long, long> budgets = {})
        : scripts_(std::move(scripts)), budgets_(std::move(budgets)) {
        for (const auto& [x, values] : scripts_) {
            if (values.empty()) {
                throw Error(ErrorKind::InvalidArgument, "limit oracle query " + std::to_string(x) + " has no stages");
            }
            if (auto b = budget(x); b && changes(x) > *b) {
                throw Error(ErrorKind::BudgetExceeded, "limit oracle query " + std::to_string(x) + " changes " +
                                                           std::to_string(changes(x)) + " times, budget " +
                                                           std::to_string(*b));
            }
        }
    }

    bool has_query(long x) const { return scripts_.count(x) != 0; }

    std::vector<long> queries() const {
        std::vector<long> out;
        for (const auto& [x, _] : scripts_) out.push_back(x);
        return out;
    }

    /// Number of materialized stages for x.
    long stages(long x) const { return static_cast<long>(script(x).size()); }

    const V& approx(long x, long t) const {
        const auto& s = script(x);
        const auto idx = static_cast<std::size_t>(t < 0 ? 0 : t);
        return idx < s.size() ? s[idx] : s.back();
    }

    /// The value after the last materialized stage.
    const V& limit(long x) const { return script(x).back(); }

    long changes(long x) const {
        const auto& s = script(x);
        long n = 0;
        for (std::size_t t = 1; t < s.size(); ++t) n += (s[t] == s[t - 1]) ? 0 : 1;
        return n;
    }

    /// First stage from which the approximation no longer changes.
    long stabilization_stage(long x) const {
        const auto& s = script(x);
        std::size_t t = s.size() - 1;
        while (t > 0 && s[t - 1] == s[t]) --t;
        return static_cast<long>(t);
    }

    std::optional<long> budget(long x) const {
        auto it = budgets_.find(x);
        if (it == budgets_.end()) return std::nullopt;
        return it->second;
    }

private:
    const std::vector<V>& script(long x) const {
        auto it = scripts_.find(x);
        if (it == scripts_.end()) {
            throw Error(ErrorKind::InvalidArgument, "limit oracle has no script for query " + std::to_string(x));
        }
        return it->second;
    }

    std::map<long, std::vector<V>> scripts_;
    std::map<long, long> budgets_;
};

}  // namespace randlab
