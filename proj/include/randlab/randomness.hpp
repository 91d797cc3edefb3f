#pragma once

#include "randlab/cauchy.hpp"
#include "randlab/check.hpp"
#include "randlab/interval.hpp"
#include "randlab/limit_oracle.hpp"
#include "randlab/rational.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace randlab {

enum class TestKind { ML, Schnorr, Solovay, FinitelyBounded, IntervalSequence, Pi1, Demuth, WeakDemuth };

std::string_view to_string(TestKind kind) noexcept;
/// Accepts the upper-case tags used in fixtures ("ML", "SCHNORR", ...).
TestKind parse_test_kind(std::string_view tag);

/// One block Q^m_r(0..) of an interval-sequence test with its excision set E^m_r.
struct IntervalSequenceBlock {
    long m = 0;
    long r = 0;
    std::vector<RationalInterval> intervals;  // indexed by k
    std::set<long> excised;
};

/// Rational sequence q_n and finite index sets C_m witnessing a Pi_1-number.
struct Pi1Data {
    std::vector<Rational> q;
    std::vector<std::set<long>> c;  // c[m] = C_m
};

/// A finite-stage randomness test of one of eight kinds.
///
/// Every component m keeps its version history; all kinds except the Demuth
/// kinds have exactly one version. Queries use the final version. For
/// INTERVAL_SEQUENCE and PI1 the components are derived from the kind data by
/// the respective constructions and stored alongside it.
struct TestFamily {
    TestKind kind = TestKind::ML;
    std::string label;
    bool relativized = false;        // produced by a construction relative to 0'
    bool claimed_universal = false;  // accepted, never verified

    std::map<long, std::vector<IntervalUnion>> components;

    std::map<long, Rational> declared_measures;  // SCHNORR
    std::optional<Rational> solovay_bound;       // SOLOVAY
    std::vector<IntervalSequenceBlock> blocks;   // INTERVAL_SEQUENCE
    std::optional<Pi1Data> pi1;                  // PI1
    std::map<long, long> budgets;                // DEMUTH, WEAK_DEMUTH

    /// Final version, or the empty set when component m has no version yet.
    IntervalUnion final_component(long m) const;
    long version_count(long m) const;
    long max_index() const;
};

/// Per-kind invariants, all checked exactly.
CheckReport validate(const TestFamily& t);
/// Checks `t` against the invariants of `as`; a SCHNORR fixture passes as ML.
CheckReport validate_as(const TestFamily& t, TestKind as);

enum class VerdictResult { Captured, Escaped, UndecidedAtDepth };

std::string_view to_string(VerdictResult v) noexcept;

struct ComponentVerdict {
    long m = 0;
    VerdictResult result = VerdictResult::UndecidedAtDepth;
    std::optional<RationalInterval> witness;  // the part containing the window when captured
    RationalInterval window = RationalInterval::point(Rational(0));
    long precision = 0;
};

struct EvaluationSummary {
    std::string convention;
    std::string status;
    long hits = 0;
    long escapes = 0;
    long undecided = 0;
    std::optional<long> passing_witness;  // weak Demuth: some escaped m
    std::optional<long> last_hit;
    bool finite_depth_surrogate = true;
};

struct Evaluation {
    std::vector<ComponentVerdict> components;
    EvaluationSummary summary;
};

/// Queries z at precisions 0..64 until each component with index <= depth is
/// decided. Never claims an infinite-level verdict.
Evaluation evaluate(const TestFamily& t, const CauchyName& z, long depth);

/// Threshold construction: component k collects the points lying in at least
/// ceil(c) * 2^k of the Solovay components with index <= depth, k = 0..depth.
TestFamily convert_solovay_to_ml(const TestFamily& t, long depth);

/// B_m = union over n <= depth of (q_n - 2^{-m-1-k(n)}, q_n + 2^{-m-1-k(n)}) within [0,1],
/// k(n) = #{j <= n : j in C_{m+1}}, for every m with C_{m+1} given.
/// Throws Error(InvariantViolation) if the Pi_1 bound or a measure bound fails.
TestFamily build_pi1_ml_test(const std::vector<Rational>& q, const std::vector<std::set<long>>& c, long depth);

/// Measure of the union of [q_n, q_{n+1}] over n < depth with n not in C_m.
Rational pi1_residual_measure(const std::vector<Rational>& q, const std::set<long>& c_m, long depth);

/// C_m = {n <= depth : Hop_m(q_n, q_{n+1})} for each m.
/// Throws Error(NotPrefixFree) naming the offending pair.
std::vector<std::set<long>> build_hop_sets(const std::vector<Rational>& q, const std::vector<std::vector<BitString>>& v,
                                           long depth);

/// Appends a version of component m. Throws Error(BudgetExceeded) or
/// Error(MeasureBoundViolation).
TestFamily demuth_update(const TestFamily& t, long m, const IntervalUnion& new_version);

struct DemuthEvent {
    long m;
    IntervalUnion version;
};

/// Applies events in order through demuth_update.
TestFamily replay_updates(TestFamily t, const std::vector<DemuthEvent>& events);

/// G_m = union over r <= depth and k not in E^m_r of Q^m_r(k), one component
/// per m, declared measure = exact measure. Tagged relativized.
TestFamily interval_sequence_to_schnorr(const TestFamily& t, long depth);

/// Reverse direction. The oracle's query m scripts the stage-wise
/// approximations of G_m; each stage is split greedily into blocks r = 1..depth
/// of measure <= 2^{-(m+r)}. Intervals from stages that are later revised are
/// excised, so only the limit approximation survives.
TestFamily schnorr_to_interval_sequence(const LimitOracle<IntervalUnion>& oracle, long depth);

/// Recomputes the stored components of INTERVAL_SEQUENCE and PI1 tests from
/// their kind data (depth = everything materialized). No-op for other kinds.
void refresh_derived_components(TestFamily& t);

/// The failing class for one m: all non-excised intervals over r <= depth.
IntervalUnion interval_sequence_class(const TestFamily& t, long m, long depth);

}  // namespace randlab
