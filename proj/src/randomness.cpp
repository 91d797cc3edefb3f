#include "randlab/randomness.hpp"

#include "randlab/errors.hpp"

#include <algorithm>
#include <climits>

namespace randlab {

std::string_view to_string(TestKind kind) noexcept {
    switch (kind) {
        case TestKind::ML: return "ML";
        case TestKind::Schnorr: return "SCHNORR";
        case TestKind::Solovay: return "SOLOVAY";
        case TestKind::FinitelyBounded: return "FINITELY_BOUNDED";
        case TestKind::IntervalSequence: return "INTERVAL_SEQUENCE";
        case TestKind::Pi1: return "PI1";
        case TestKind::Demuth: return "DEMUTH";
        case TestKind::WeakDemuth: return "WEAK_DEMUTH";
    }
    return "ML";
}

TestKind parse_test_kind(std::string_view tag) {
    for (auto k : {TestKind::ML, TestKind::Schnorr, TestKind::Solovay, TestKind::FinitelyBounded,
                   TestKind::IntervalSequence, TestKind::Pi1, TestKind::Demuth, TestKind::WeakDemuth}) {
        if (to_string(k) == tag) return k;
    }
    throw Error(ErrorKind::ParseError, "unknown test kind \"" + std::string(tag) + "\"");
}

std::string_view to_string(VerdictResult v) noexcept {
    switch (v) {
        case VerdictResult::Captured: return "CAPTURED";
        case VerdictResult::Escaped: return "ESCAPED";
        case VerdictResult::UndecidedAtDepth: return "UNDECIDED_AT_DEPTH";
    }
    return "UNDECIDED_AT_DEPTH";
}

IntervalUnion TestFamily::final_component(long m) const {
    auto it = components.find(m);
    if (it == components.end() || it->second.empty()) return {};
    return it->second.back();
}

long TestFamily::version_count(long m) const {
    auto it = components.find(m);
    return it == components.end() ? 0 : static_cast<long>(it->second.size());
}

long TestFamily::max_index() const { return components.empty() ? -1 : components.rbegin()->first; }

namespace {

std::string idx(std::string_view name, std::initializer_list<std::pair<const char*, long>> fields) {
    std::string s(name);
    s += "[";
    bool first = true;
    for (const auto& [k, v] : fields) {
        if (!first) s += ",";
        first = false;
        s += k;
        s += "=";
        s += std::to_string(v);
    }
    return s + "]";
}

bool has_ml_bound(TestKind k) {
    return k == TestKind::ML || k == TestKind::Schnorr || k == TestKind::Demuth || k == TestKind::WeakDemuth ||
           k == TestKind::FinitelyBounded || k == TestKind::Pi1;
}

void check_ml_bounds(const TestFamily& t, CheckReport& report) {
    for (const auto& [m, versions] : t.components) {
        const Rational bound = Rational::pow2(-m);
        for (std::size_t v = 0; v < versions.size(); ++v) {
            const Rational mu = versions[v].measure();
            const bool ok = mu <= bound;
            report.add({idx("measure_bound", {{"m", m}, {"version", static_cast<long>(v)}}), ok,
                        ok ? "" : "measure " + mu.to_string() + " exceeds 2^{-m} = " + bound.to_string(),
                        {{"measure", mu.to_string()}, {"bound", bound.to_string()}}});
        }
    }
}

void check_schnorr(const TestFamily& t, CheckReport& report) {
    for (const auto& [m, versions] : t.components) {
        const Rational mu = t.final_component(m).measure();
        auto it = t.declared_measures.find(m);
        if (it == t.declared_measures.end()) {
            report.add({idx("declared_measure", {{"m", m}}), false, "no declared measure for component",
                        {{"actual", mu.to_string()}}});
            continue;
        }
        const bool ok = it->second == mu;
        report.add({idx("declared_measure", {{"m", m}}), ok,
                    ok ? "" : "declared " + it->second.to_string() + " != actual " + mu.to_string(),
                    {{"declared", it->second.to_string()}, {"actual", mu.to_string()}}});
    }
}

void check_solovay(const TestFamily& t, CheckReport& report) {
    if (!t.solovay_bound) {
        report.add({"solovay_bound", false, "no declared total-measure bound", {}});
        return;
    }
    Rational running;
    for (const auto& [m, versions] : t.components) {
        running += t.final_component(m).measure();
        const bool ok = running <= *t.solovay_bound;
        report.add({idx("solovay_running_sum", {{"m", m}}), ok,
                    ok ? "" : "running sum " + running.to_string() + " exceeds " + t.solovay_bound->to_string(),
                    {{"running_sum", running.to_string()}, {"bound", t.solovay_bound->to_string()}}});
    }
}

void check_demuth_budgets(const TestFamily& t, CheckReport& report) {
    for (const auto& [m, versions] : t.components) {
        auto it = t.budgets.find(m);
        const long count = static_cast<long>(versions.size());
        if (it == t.budgets.end()) {
            report.add({idx("version_budget", {{"m", m}}), false, "no declared change budget",
                        {{"versions", std::to_string(count)}}});
            continue;
        }
        const bool ok = count <= it->second;
        report.add({idx("version_budget", {{"m", m}}), ok,
                    ok ? "" : std::to_string(count) + " versions exceed budget " + std::to_string(it->second),
                    {{"versions", std::to_string(count)}, {"budget", std::to_string(it->second)}}});
    }
}

IntervalUnion block_class(const IntervalSequenceBlock& b) {
    std::vector<RationalInterval> kept;
    for (std::size_t k = 0; k < b.intervals.size(); ++k) {
        if (!b.excised.count(static_cast<long>(k))) kept.push_back(b.intervals[k]);
    }
    return normalize_union(kept);
}

void check_interval_sequence(const TestFamily& t, CheckReport& report) {
    std::set<long> ms;
    for (const auto& b : t.blocks) {
        ms.insert(b.m);
        const Rational mu = block_class(b).measure();
        const Rational bound = Rational::pow2(-(b.m + b.r));
        const bool ok = mu <= bound;
        report.add({idx("block_bound", {{"m", b.m}, {"r", b.r}}), ok,
                    ok ? "" : "non-excised measure " + mu.to_string() + " exceeds 2^{-(m+r)} = " + bound.to_string(),
                    {{"measure", mu.to_string()}, {"bound", bound.to_string()}}});
    }
    for (long m : ms) {
        const Rational mu = interval_sequence_class(t, m, LONG_MAX).measure();
        const Rational bound = Rational::pow2(-m);
        const bool ok = mu <= bound;
        report.add({idx("aggregate_bound", {{"m", m}}), ok,
                    ok ? "" : "failing class measure " + mu.to_string() + " exceeds 2^{-m} = " + bound.to_string(),
                    {{"measure", mu.to_string()}, {"bound", bound.to_string()}}});
    }
}

void check_pi1(const TestFamily& t, CheckReport& report) {
    if (!t.pi1) {
        report.add({"pi1_data", false, "PI1 test without (q, C) data", {}});
        return;
    }
    const auto& d = *t.pi1;
    const long depth = static_cast<long>(d.q.size()) - 1;
    for (std::size_t m = 0; m < d.c.size(); ++m) {
        const Rational mu = pi1_residual_measure(d.q, d.c[m], depth);
        const Rational bound = Rational::pow2(-static_cast<long>(m));
        const bool ok = mu < bound;
        report.add({idx("pi1_residual", {{"m", static_cast<long>(m)}}), ok,
                    ok ? "" : "residual " + mu.to_string() + " is not below 2^{-m} = " + bound.to_string(),
                    {{"measure", mu.to_string()}, {"bound", bound.to_string()}}});
    }
}

std::optional<RationalInterval> find_part(const IntervalUnion& u, const RationalInterval& window) {
    return u.part_containing(window);
}

ComponentVerdict decide(long m, const IntervalUnion& component, const CauchyName& z) {
    constexpr long kMaxPrecision = 64;
    ComponentVerdict v;
    v.m = m;
    for (long p = 0; p <= kMaxPrecision; ++p) {
        auto window = z.window(p);
        v.precision = p;
        if (auto part = find_part(component, window)) {
            v.result = VerdictResult::Captured;
            v.witness = std::move(part);
            v.window = std::move(window);
            return v;
        }
        if (!component.intersects(window)) {
            v.result = VerdictResult::Escaped;
            v.window = std::move(window);
            return v;
        }
        v.window = std::move(window);
        if (z.exact_value()) break;
    }
    v.result = VerdictResult::UndecidedAtDepth;
    return v;
}

void summarize(TestKind kind, Evaluation& e) {
    auto& s = e.summary;
    for (const auto& c : e.components) {
        if (c.result == VerdictResult::Captured) {
            ++s.hits;
            s.last_hit = c.m;
        } else if (c.result == VerdictResult::Escaped) {
            ++s.escapes;
            if (!s.passing_witness) s.passing_witness = c.m;
        } else {
            ++s.undecided;
        }
    }
    const long n = static_cast<long>(e.components.size());
    switch (kind) {
        case TestKind::Solovay:
            s.convention = "count of components 0..depth containing z (passing: finitely many)";
            s.status = "HIT_COUNT_AT_DEPTH";
            s.passing_witness.reset();
            break;
        case TestKind::Demuth: {
            s.convention = "hits among final versions 0..depth (passing: escapes almost every component)";
            s.passing_witness.reset();
            bool tail_clear = !e.components.empty() && e.components.back().result == VerdictResult::Escaped;
            if (s.undecided > 0) {
                s.status = "UNDECIDED_AT_DEPTH";
            } else if (s.hits == 0) {
                s.status = "NO_HITS_TO_DEPTH";
            } else if (tail_clear) {
                s.status = "ESCAPES_AFTER_LAST_HIT";
            } else {
                s.status = "HIT_AT_DEPTH_BOUNDARY";
            }
            break;
        }
        case TestKind::WeakDemuth:
            s.convention = "some final component 0..depth avoided (passing: there is an m with z not in S_m)";
            s.status = s.passing_witness ? "PASSING_WITNESS_FOUND"
                       : s.undecided > 0 ? "UNDECIDED_AT_DEPTH"
                                         : "NO_ESCAPE_TO_DEPTH";
            break;
        default:
            s.convention = "membership in every component 0..depth (failing: in the intersection)";
            s.passing_witness.reset();
            if (s.hits == n && n > 0) {
                s.status = "IN_ALL_COMPONENTS_TO_DEPTH";
            } else if (s.escapes > 0) {
                s.status = "ESCAPES_A_COMPONENT";
            } else {
                s.status = "UNDECIDED_AT_DEPTH";
            }
            break;
    }
}

std::vector<std::vector<RationalInterval>> split_into_blocks(const IntervalUnion& g, long m, long depth,
                                                             std::vector<RationalInterval>& leftover) {
    std::vector<std::vector<RationalInterval>> blocks(static_cast<std::size_t>(depth));
    long r = 1;
    Rational capacity = Rational::pow2(-(m + r));
    for (const auto& part : g.parts()) {
        RationalInterval rest = part;
        while (true) {
            if (r > depth) {
                leftover.push_back(rest);
                break;
            }
            auto& block = blocks[static_cast<std::size_t>(r - 1)];
            if (rest.length() <= capacity) {
                capacity -= rest.length();
                block.push_back(rest);
                break;
            }
            if (capacity.sign() > 0) {
                const Rational cut = rest.lo() + capacity;
                block.emplace_back(rest.lo(), cut, rest.lo_open(), true);
                rest = RationalInterval(cut, rest.hi(), false, rest.hi_open());
            }
            ++r;
            capacity = Rational::pow2(-(m + r));
        }
    }
    return blocks;
}

}  // namespace

CheckReport validate_as(const TestFamily& t, TestKind as) {
    CheckReport report;
    if (has_ml_bound(as)) check_ml_bounds(t, report);
    switch (as) {
        case TestKind::Schnorr: check_schnorr(t, report); break;
        case TestKind::Solovay: check_solovay(t, report); break;
        case TestKind::Demuth:
        case TestKind::WeakDemuth: check_demuth_budgets(t, report); break;
        case TestKind::IntervalSequence: check_interval_sequence(t, report); break;
        case TestKind::Pi1: check_pi1(t, report); break;
        default: break;
    }
    if (report.records.empty()) report.add({"non_empty", true, "no components to check", {}});
    return report;
}

CheckReport validate(const TestFamily& t) { return validate_as(t, t.kind); }

Evaluation evaluate(const TestFamily& t, const CauchyName& z, long depth) {
    if (depth < 0 || depth > t.max_index()) {
        throw Error(ErrorKind::BudgetExceeded, "evaluation depth " + std::to_string(depth) +
                                                   " beyond materialized components (max index " +
                                                   std::to_string(t.max_index()) + ")");
    }
    Evaluation e;
    for (const auto& [m, versions] : t.components) {
        if (m > depth) break;
        e.components.push_back(decide(m, t.final_component(m), z));
    }
    summarize(t.kind, e);
    return e;
}

TestFamily convert_solovay_to_ml(const TestFamily& t, long depth) {
    if (t.kind != TestKind::Solovay) throw Error(ErrorKind::InvalidArgument, "convert_solovay_to_ml needs a SOLOVAY test");
    if (!t.solovay_bound) throw Error(ErrorKind::InvalidArgument, "SOLOVAY test without declared bound");
    if (depth < 0 || depth > 60) throw Error(ErrorKind::BudgetExceeded, "conversion depth outside [0,60]");

    const mpz_class ceil_c = t.solovay_bound->ceil();
    const long base = ceil_c < 1 ? 1 : ceil_c.get_si();
    std::vector<IntervalUnion> sets;
    for (const auto& [m, versions] : t.components) {
        if (m <= depth) sets.push_back(t.final_component(m));
    }

    TestFamily out;
    out.kind = TestKind::ML;
    out.label = t.label.empty() ? "solovay-threshold" : t.label + "/ml";
    for (long k = 0; k <= depth; ++k) {
        const long threshold = base << k;
        IntervalUnion component;
        if (threshold <= static_cast<long>(sets.size())) component = coverage_at_least(sets, threshold);
        const Rational bound = Rational::pow2(-k);
        if (component.measure() > bound) {
            throw Error(ErrorKind::InvariantViolation, "converted component " + std::to_string(k) + " has measure " +
                                                           component.measure().to_string() + " > " + bound.to_string());
        }
        out.components[k] = {std::move(component)};
    }
    return out;
}

Rational pi1_residual_measure(const std::vector<Rational>& q, const std::set<long>& c_m, long depth) {
    std::vector<RationalInterval> parts;
    for (long n = 0; n < depth && n + 1 < static_cast<long>(q.size()); ++n) {
        if (c_m.count(n)) continue;
        const auto& a = q[static_cast<std::size_t>(n)];
        const auto& b = q[static_cast<std::size_t>(n + 1)];
        parts.push_back(RationalInterval::closed(min(a, b), max(a, b)));
    }
    return normalize_union(parts).measure();
}

TestFamily build_pi1_ml_test(const std::vector<Rational>& q, const std::vector<std::set<long>>& c, long depth) {
    if (depth < 0 || static_cast<long>(q.size()) < depth + 1) {
        throw Error(ErrorKind::InvalidArgument, "need q_0..q_depth materialized");
    }
    for (std::size_t m = 0; m < c.size(); ++m) {
        const Rational residual = pi1_residual_measure(q, c[m], depth);
        const Rational bound = Rational::pow2(-static_cast<long>(m));
        if (!(residual < bound)) {
            throw Error(ErrorKind::InvariantViolation, "Pi_1 bound fails at m = " + std::to_string(m) + ": residual " +
                                                           residual.to_string() + " >= " + bound.to_string());
        }
    }

    const auto unit = RationalInterval::closed(Rational(0), Rational(1));
    TestFamily out;
    out.kind = TestKind::ML;
    out.label = "pi1-derived";
    for (std::size_t m = 0; m + 1 < c.size(); ++m) {
        const auto& next = c[m + 1];
        std::vector<RationalInterval> balls;
        long k = 0;
        for (long n = 0; n <= depth; ++n) {
            if (next.count(n)) ++k;
            const Rational radius = Rational::pow2(-static_cast<long>(m) - 1 - k);
            const auto& centre = q[static_cast<std::size_t>(n)];
            if (auto clipped = RationalInterval::open(centre - radius, centre + radius).intersect(unit)) {
                balls.push_back(std::move(*clipped));
            }
        }
        IntervalUnion b = normalize_union(balls);
        const Rational bound = Rational::pow2(-static_cast<long>(m));
        if (b.measure() > bound) {
            throw Error(ErrorKind::InvariantViolation, "B_" + std::to_string(m) + " has measure " +
                                                           b.measure().to_string() + " > " + bound.to_string());
        }
        out.components[static_cast<long>(m)] = {std::move(b)};
    }
    return out;
}

std::vector<std::set<long>> build_hop_sets(const std::vector<Rational>& q, const std::vector<std::vector<BitString>>& v,
                                           long depth) {
    for (const auto& x : q) {
        if (x.sign() < 0 || x > Rational(1)) {
            throw Error(ErrorKind::InvalidArgument, "hop sets need q values in [0,1], got " + x.to_string());
        }
    }
    std::vector<std::set<long>> out;
    for (const auto& vm : v) {
        for (const auto& s : vm) require_bits(s);
        for (const auto& s : vm) {
            for (const auto& t : vm) {
                if (s != t && t.size() > s.size() && t.compare(0, s.size(), s) == 0) {
                    throw Error(ErrorKind::NotPrefixFree, "\"" + s + "\" is a prefix of \"" + t + "\"");
                }
            }
        }
        auto locate = [&](const Rational& x) -> const BitString* {
            for (const auto& s : vm) {
                if (dyadic_cylinder(s).contains(x)) return &s;
            }
            return nullptr;
        };
        std::set<long> cm;
        for (long n = 0; n <= depth && n + 1 < static_cast<long>(q.size()); ++n) {
            const BitString* sigma = locate(q[static_cast<std::size_t>(n)]);
            const BitString* tau = locate(q[static_cast<std::size_t>(n + 1)]);
            if (!sigma || !tau || *sigma == *tau) continue;
            const auto cs = dyadic_cylinder(*sigma);
            const auto ct = dyadic_cylinder(*tau);
            if (cs.hi() != ct.lo() && ct.hi() != cs.lo()) cm.insert(n);
        }
        out.push_back(std::move(cm));
    }
    return out;
}

TestFamily demuth_update(const TestFamily& t, long m, const IntervalUnion& new_version) {
    if (t.kind != TestKind::Demuth && t.kind != TestKind::WeakDemuth) {
        throw Error(ErrorKind::InvalidArgument, "demuth_update on a " + std::string(to_string(t.kind)) + " test");
    }
    auto it = t.budgets.find(m);
    if (it == t.budgets.end()) {
        throw Error(ErrorKind::BudgetExceeded, "component " + std::to_string(m) + " has no declared change budget");
    }
    const long count = t.version_count(m);
    if (count >= it->second) {
        throw Error(ErrorKind::BudgetExceeded, "component " + std::to_string(m) + " already has " +
                                                   std::to_string(count) + " versions, budget " +
                                                   std::to_string(it->second));
    }
    const Rational mu = new_version.measure();
    const Rational bound = Rational::pow2(-m);
    if (mu > bound) {
        throw Error(ErrorKind::MeasureBoundViolation, "version of component " + std::to_string(m) + " has measure " +
                                                          mu.to_string() + " > " + bound.to_string());
    }
    TestFamily out = t;
    out.components[m].push_back(new_version);
    return out;
}

TestFamily replay_updates(TestFamily t, const std::vector<DemuthEvent>& events) {
    for (const auto& e : events) t = demuth_update(t, e.m, e.version);
    return t;
}

IntervalUnion interval_sequence_class(const TestFamily& t, long m, long depth) {
    std::vector<RationalInterval> kept;
    for (const auto& b : t.blocks) {
        if (b.m != m || b.r > depth) continue;
        const auto cls = block_class(b);
        kept.insert(kept.end(), cls.parts().begin(), cls.parts().end());
    }
    return normalize_union(kept);
}

void refresh_derived_components(TestFamily& t) {
    if (t.kind == TestKind::IntervalSequence) {
        t.components.clear();
        std::set<long> ms;
        for (const auto& b : t.blocks) ms.insert(b.m);
        for (long m : ms) t.components[m] = {interval_sequence_class(t, m, LONG_MAX)};
    } else if (t.kind == TestKind::Pi1 && t.pi1) {
        const long depth = static_cast<long>(t.pi1->q.size()) - 1;
        t.components = build_pi1_ml_test(t.pi1->q, t.pi1->c, depth).components;
    }
}

TestFamily interval_sequence_to_schnorr(const TestFamily& t, long depth) {
    if (t.kind != TestKind::IntervalSequence) {
        throw Error(ErrorKind::InvalidArgument, "interval_sequence_to_schnorr needs an INTERVAL_SEQUENCE test");
    }
    const auto report = validate(t);
    if (const auto* bad = report.first_failure()) throw Error(ErrorKind::InvariantViolation, bad->name + ": " + bad->detail);

    std::set<long> ms;
    for (const auto& b : t.blocks) ms.insert(b.m);
    TestFamily out;
    out.kind = TestKind::Schnorr;
    out.relativized = true;
    out.label = t.label.empty() ? "interval-sequence/schnorr" : t.label + "/schnorr";
    for (long m : ms) {
        IntervalUnion g = interval_sequence_class(t, m, depth);
        out.declared_measures[m] = g.measure();
        out.components[m] = {std::move(g)};
    }
    return out;
}

TestFamily schnorr_to_interval_sequence(const LimitOracle<IntervalUnion>& oracle, long depth) {
    if (depth < 1) throw Error(ErrorKind::InvalidArgument, "need at least one block per component");
    TestFamily out;
    out.kind = TestKind::IntervalSequence;
    out.relativized = false;
    out.label = "limit-schnorr/interval-sequence";
    for (long m : oracle.queries()) {
        std::vector<IntervalSequenceBlock> blocks(static_cast<std::size_t>(depth));
        std::vector<std::vector<long>> active(static_cast<std::size_t>(depth));
        std::vector<std::vector<RationalInterval>> previous(static_cast<std::size_t>(depth));
        std::vector<RationalInterval> final_leftover;
        for (long r = 1; r <= depth; ++r) {
            blocks[static_cast<std::size_t>(r - 1)].m = m;
            blocks[static_cast<std::size_t>(r - 1)].r = r;
        }
        const long stages = oracle.stages(m);
        for (long stage = 0; stage < stages; ++stage) {
            std::vector<RationalInterval> leftover;
            const auto pieces = split_into_blocks(oracle.approx(m, stage), m, depth, leftover);
            for (std::size_t r = 0; r < pieces.size(); ++r) {
                if (stage > 0 && pieces[r] == previous[r]) continue;
                auto& block = blocks[r];
                // A mind change abandons everything enumerated for this block so far.
                for (long k : active[r]) block.excised.insert(k);
                active[r].clear();
                for (const auto& iv : pieces[r]) {
                    active[r].push_back(static_cast<long>(block.intervals.size()));
                    block.intervals.push_back(iv);
                }
                previous[r] = pieces[r];
            }
            if (stage == stages - 1) final_leftover = std::move(leftover);
        }
        if (!final_leftover.empty()) {
            throw Error(ErrorKind::InvariantViolation,
                        "limit approximation of G_" + std::to_string(m) + " does not fit into " +
                            std::to_string(depth) + " blocks of measure 2^{-(m+r)}");
        }
        for (auto& b : blocks) {
            if (!b.intervals.empty()) out.blocks.push_back(std::move(b));
        }
    }
    refresh_derived_components(out);
    return out;
}

}  // namespace randlab
