#include "randlab/labcli.hpp"

#include "randlab/derivatives.hpp"
#include "randlab/errors.hpp"
#include "randlab/fixtures.hpp"

#include <atomic>
#include <climits>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <sstream>
#include <thread>

namespace randlab::cli {

using OJson = nlohmann::ordered_json;

namespace {

OJson record_json(const std::string& prefix, const CheckRecord& r) {
    OJson j;
    j["name"] = prefix.empty() ? r.name : prefix + ":" + r.name;
    j["status"] = r.pass ? "PASS" : "FAIL";
    if (!r.detail.empty()) j["detail"] = r.detail;
    OJson values = OJson::object();
    for (const auto& [k, v] : r.values) values[k] = v;
    j["values"] = values;
    return j;
}

void append(std::vector<CheckRecord>& out, const CheckReport& report, const std::string& scope = "") {
    for (auto r : report.records) {
        if (!scope.empty()) r.name = scope + "." + r.name;
        out.push_back(std::move(r));
    }
}

CheckRecord expect_equal(std::string name, const std::string& actual, const std::string& expected) {
    const bool ok = actual == expected;
    return {std::move(name), ok, ok ? "" : "expected " + expected + ", got " + actual,
            {{"actual", actual}, {"expected", expected}}};
}

long json_long(const Json& j, const char* key, long fallback) {
    return j.contains(key) && j[key].is_number_integer() ? j[key].get<long>() : fallback;
}

Rational json_rational(const Json& j, const char* key, const Rational& fallback) {
    if (!j.contains(key)) return fallback;
    return j[key].is_number_integer() ? Rational(j[key].get<long>()) : Rational::parse(j[key].get<std::string>());
}

std::vector<CheckRecord> check_test(const Json& j) {
    std::vector<CheckRecord> out;
    const auto t = test_from_json(j);
    append(out, validate(t));
    if (t.kind == TestKind::Solovay && t.max_index() >= 0) {
        const auto ml = convert_solovay_to_ml(t, std::min<long>(t.max_index(), 60));
        append(out, validate_as(ml, TestKind::ML), "solovay_to_ml");
    }
    if (t.kind == TestKind::IntervalSequence && validate(t).pass()) {
        const auto s = interval_sequence_to_schnorr(t, LONG_MAX);
        append(out, validate(s), "to_schnorr");
    }
    if (j.contains("evaluations")) {
        std::size_t i = 0;
        for (const auto& e : j["evaluations"]) {
            const auto z = name_from_string(e.at("point").get<std::string>());
            const auto ev = evaluate(t, z, e.at("depth").get<long>());
            out.push_back(expect_equal("evaluation[" + std::to_string(i++) + "]", ev.summary.status,
                                       e.at("expect_status").get<std::string>()));
        }
    }
    return out;
}

std::vector<CheckRecord> check_protocol(const Json& j) {
    std::vector<CheckRecord> out;
    auto t = test_from_json(j.at("test"));
    append(out, validate(t), "initial");
    std::size_t i = 0;
    for (const auto& e : j.at("events")) {
        const long m = e.at("m").get<long>();
        const auto version = union_from_json(e.at("version"));
        std::string outcome = "ACCEPTED";
        try {
            t = demuth_update(t, m, version);
        } catch (const Error& err) {
            outcome = std::string(to_string(err.kind()));
        }
        auto r = expect_equal("event[" + std::to_string(i++) + "]", outcome, e.value("expect", std::string("ACCEPTED")));
        r.values.emplace_back("m", std::to_string(m));
        r.values.emplace_back("measure", version.measure().to_string());
        out.push_back(std::move(r));
    }
    append(out, validate(t), "final");
    return out;
}

std::vector<CheckRecord> check_slope(const Json& j) {
    const auto f = function_from_json(j.at("function"));
    const auto c = cover_from_json(j.at("cover"));
    const Rational w = json_rational(j, "w", Rational(0));
    const Rational z = json_rational(j, "z", Rational(1));
    const auto s = slope_bounds_check(f, c, w, z, json_long(j, "grid", 10));
    CheckRecord r{"slope_bounds", s.pass, s.counterexample,
                  {{"clause_ii", s.clause_ii ? "PASS" : "FAIL"},
                   {"clause_iii", s.clause_iii ? "PASS" : "FAIL"},
                   {"cover_intervals", std::to_string(s.cover_intervals_checked)},
                   {"grid_pairs", std::to_string(s.grid_pairs_checked)}}};
    for (std::size_t k = 0; k < s.evidence.size(); ++k) r.values.emplace_back("evidence" + std::to_string(k), s.evidence[k].to_string());
    return {r};
}

std::vector<CheckRecord> check_measure(const Json& j) {
    std::vector<CheckRecord> out;
    const auto mu = measure_from_json(j);
    append(out, validate_measure(mu, json_long(j, "validate_depth", std::min(mu.budget(), 8L))));
    const long tdepth = json_long(j, "transport_depth", -1);
    if (tdepth >= 0) {
        append(out, transport_order_check(mu, tdepth));
        const long max_tau = json_long(j, "pushforward_max_tau", -1);
        for (long len = 1; len <= max_tau; ++len) {
            for (unsigned long i = 0; i < (1UL << len); ++i) {
                const auto tau = bits_of(i, len);
                const auto p = transport_pushforward_check(mu, tau, tdepth);
                out.push_back({"pushforward[tau=" + tau + "]", p.pass,
                               p.pass ? "" : "|sum - target| exceeds residual",
                               {{"sum", p.sum.to_string()}, {"target", p.target.to_string()},
                                {"residual", p.residual.to_string()}}});
            }
        }
    }
    if (j.contains("transports")) {
        for (const auto& e : j["transports"]) {
            const auto prefix = e.at("prefix").get<std::string>();
            const auto t = transport(mu, prefix);
            if (e.contains("expect_c_prefix")) {
                out.push_back(expect_equal("transport[" + prefix + "].c_prefix", t.c_prefix, e["expect_c_prefix"]));
            }
            if (e.contains("expect_image")) {
                const auto expected = RationalInterval::parse(e["expect_image"].get<std::string>());
                out.push_back(expect_equal("transport[" + prefix + "].image", t.image.to_string(), expected.to_string()));
            }
        }
    }
    return out;
}

std::vector<CheckRecord> check_functional(const Json& j) {
    std::vector<CheckRecord> out;
    const auto phi = functional_from_json(j);
    const long depth = json_long(j, "additivity_depth", std::min(phi.outputs(), 8L));
    const auto mu = CylinderMeasure::induced(phi, depth);
    append(out, validate_measure(mu, depth), "lambda_phi");
    std::optional<CheckRecord> recount_fail;
    for (long n = 0; n <= depth && !recount_fail; ++n) {
        for (unsigned long i = 0; i < (1UL << n); ++i) {
            const auto s = bits_of(i, n);
            const Rational direct = induced_measure(phi, s);
            if (direct != mu.mass(s)) {
                recount_fail = CheckRecord{"recount", false, "level table disagrees with direct count",
                                           {{"sigma", s}, {"direct", direct.to_string()}, {"table", mu.mass(s).to_string()}}};
                break;
            }
        }
    }
    out.push_back(recount_fail ? *recount_fail : CheckRecord{"recount", true, "", {}});
    if (j.contains("expect")) {
        for (const auto& [sigma, value] : j["expect"].items()) {
            out.push_back(expect_equal("lambda_phi[" + sigma + "]", induced_measure(phi, sigma).to_string(),
                                       Rational::parse(value.get<std::string>()).to_string()));
        }
    }
    return out;
}

std::vector<CheckRecord> check_martingale(const Json& j) {
    std::vector<CheckRecord> out;
    const auto m = martingale_from_json(j);
    const long depth = json_long(j, "check_depth", m.depth());
    append(out, check_fairness(m, depth));
    append(out, check_level_sums(m, depth));
    append(out, check_nonnegative(m, depth));
    if (j.contains("expect_violation")) {
        const auto v = find_savings_violation(m, depth);
        const std::string got = v ? v->sigma + "->" + v->tau : "none";
        out.push_back(expect_equal("savings_violation", got, j["expect_violation"].get<std::string>()));
    }
    if (m.initial_capital().sign() > 0 && check_fairness(m, depth).pass()) {
        const auto s = savings_transform(m, depth);
        append(out, check_fairness(s.transformed, depth), "savings");
        const auto v = find_savings_violation(s.transformed, depth);
        CheckRecord r{"savings.property", !v, v ? "drop " + v->drop.to_string() + " from " + v->sigma + " to " + v->tau : "",
                      {{"growth_factor", s.growth_factor.to_string()},
                       {"growth_constant", s.growth_constant.to_string()},
                       {"bank_events", std::to_string(s.bank_events)}}};
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<CheckRecord> check_oracle(const Json& j) {
    std::vector<CheckRecord> out;
    const auto oracle = oracle_from_json(j);
    for (long x : oracle.queries()) {
        const auto b = oracle.budget(x);
        const long ch = oracle.changes(x);
        CheckRecord r{"changes[x=" + std::to_string(x) + "]", !b || ch <= *b, "",
                      {{"changes", std::to_string(ch)}, {"stabilization_stage", std::to_string(oracle.stabilization_stage(x))}}};
        if (b) r.values.emplace_back("budget", std::to_string(*b));
        out.push_back(std::move(r));
    }
    if (j.contains("convert_depth")) {
        const auto is = schnorr_to_interval_sequence(oracle, j["convert_depth"].get<long>());
        append(out, validate(is), "interval_sequence");
    }
    return out;
}

OJson estimate_json(const PseudoDerivativeEstimate& e, DenjoyVerdict v, const Rational& tol) {
    OJson j;
    j["upper"] = e.upper_infinite ? "+inf" : e.upper.to_string();
    j["lower"] = e.lower_infinite ? "-inf" : e.lower.to_string();
    j["scale"] = e.scale.to_string();
    j["grid"] = e.grid_exponent;
    j["pairs"] = e.pairs;
    j["flags"] = {{"has_samples", e.has_samples},
                  {"upper_infinite", e.upper_infinite},
                  {"lower_infinite", e.lower_infinite},
                  {"stable_under_halving", e.stable_under_halving}};
    j["tolerance"] = tol.to_string();
    j["verdict"] = std::string(to_string(v));
    return j;
}

std::vector<CheckRecord> check_derivative(const Json& j) {
    std::vector<CheckRecord> out;
    const auto f = function_from_json(j.at("function"));
    const auto z = name_from_string(j.at("point").get<std::string>());
    const auto e = pseudo_derivative(f, z, json_rational(j, "scale", Rational::pow2(-10)), json_long(j, "grid", 12));
    const Rational tol = json_rational(j, "tol", Rational::pow2(-4));
    const auto v = classify_denjoy(e, tol);
    if (j.contains("expect")) out.push_back(expect_equal("verdict", std::string(to_string(v)), j["expect"]));
    if (j.contains("expect_within")) {
        const Rational target = json_rational(j["expect_within"], "value", Rational(0));
        const Rational radius = json_rational(j["expect_within"], "radius", Rational(0));
        const bool ok = !e.upper_infinite && !e.lower_infinite && abs(e.upper - target) <= radius &&
                        abs(e.lower - target) <= radius;
        out.push_back({"within", ok, ok ? "" : "estimate outside the expected window",
                       {{"upper", e.upper.to_string()}, {"lower", e.lower.to_string()},
                        {"target", target.to_string()}, {"radius", radius.to_string()}}});
    }
    if (out.empty()) out.push_back({"estimate", e.has_samples, e.has_samples ? "" : "no grid pairs", {}});
    return out;
}

std::vector<CheckRecord> check_fixture(const Fixture& fx) {
    const auto& j = fx.body;
    if (fx.type == "test") return check_test(j);
    if (fx.type == "demuth_protocol") return check_protocol(j);
    if (fx.type == "slope_check") return check_slope(j);
    if (fx.type == "measure") return check_measure(j);
    if (fx.type == "functional") return check_functional(j);
    if (fx.type == "martingale") return check_martingale(j);
    if (fx.type == "limit_oracle") return check_oracle(j);
    if (fx.type == "derivative") return check_derivative(j);
    throw Error(ErrorKind::FixtureInvalid, "unknown fixture type \"" + fx.type + "\"");
}

template <class F>
auto in_context(const std::string& path, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error(e.kind(), path + ": " + e.message());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::FixtureInvalid, path + ": " + e.what());
    }
}

std::vector<std::string> resolve_fixtures(const RunConfig& config) {
    std::vector<std::string> inputs = config.fixtures;
    if (inputs.empty()) {
        const char* env = std::getenv(kFixtureDirEnv);
        inputs.push_back(env && *env ? env : "fixtures");
    }
    std::vector<std::string> out;
    for (const auto& p : inputs) {
        if (std::filesystem::is_directory(p)) {
            for (auto& f : list_fixtures(p)) out.push_back(std::move(f));
        } else {
            out.push_back(p);
        }
    }
    return out;
}

std::string display_name(const std::string& path) { return std::filesystem::path(path).filename().string(); }

/// Checks every fixture; results land in input order regardless of scheduling.
std::vector<std::vector<CheckRecord>> run_checks(const std::vector<Fixture>& fixtures, unsigned workers) {
    std::vector<std::vector<CheckRecord>> results(fixtures.size());
    std::vector<std::exception_ptr> errors(fixtures.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < fixtures.size(); i = next++) {
            try {
                results[i] = in_context(fixtures[i].path, [&] { return check_fixture(fixtures[i]); });
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned n = std::max(1U, std::min<unsigned>(workers, static_cast<unsigned>(fixtures.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return results;
}

Fixture single_fixture(const RunConfig& config, const char* want_type = nullptr) {
    const auto paths = resolve_fixtures(config);
    if (paths.size() != 1) throw Error(ErrorKind::InvalidArgument, "command needs exactly one --fixture file");
    auto fx = load_fixture(paths[0]);
    if (want_type && fx.type != want_type) {
        throw Error(ErrorKind::FixtureInvalid, paths[0] + ": expected a fixture of type \"" + want_type + "\"");
    }
    return fx;
}

std::string require(const std::optional<std::string>& v, const char* flag) {
    if (!v) throw Error(ErrorKind::InvalidArgument, std::string("missing required flag ") + flag);
    return *v;
}

OJson config_json(const RunConfig& c) {
    OJson j;
    j["fixtures"] = c.fixtures;
    if (c.depth) j["depth"] = *c.depth;
    if (c.precision) j["precision"] = *c.precision;
    if (c.scale) j["scale"] = *c.scale;
    if (c.point) j["point"] = *c.point;
    if (c.prefix) j["prefix"] = *c.prefix;
    if (c.function) j["function"] = *c.function;
    if (c.n) j["n"] = *c.n;
    return j;
}

void finish(OJson& report, const std::vector<OJson>& records, int& exit_code) {
    long passed = 0;
    for (const auto& r : records) passed += r["status"] == "PASS" ? 1 : 0;
    report["records"] = records;
    const long failed = static_cast<long>(records.size()) - passed;
    report["summary"] = {{"checks", static_cast<long>(records.size())}, {"passed", passed}, {"failed", failed},
                         {"status", failed == 0 ? "PASS" : "FAIL"}};
    exit_code = failed == 0 ? 0 : 1;
}

OJson evaluation_json(const Evaluation& e) {
    OJson comps = OJson::array();
    for (const auto& c : e.components) {
        OJson j{{"m", c.m}, {"verdict", std::string(to_string(c.result))}, {"precision", c.precision},
                {"window", c.window.to_string()}};
        if (c.witness) j["witness"] = c.witness->to_string();
        comps.push_back(j);
    }
    OJson s{{"convention", e.summary.convention}, {"status", e.summary.status}, {"hits", e.summary.hits},
            {"escapes", e.summary.escapes}, {"undecided", e.summary.undecided},
            {"finite_depth_surrogate", e.summary.finite_depth_surrogate}};
    if (e.summary.last_hit) s["last_hit"] = *e.summary.last_hit;
    if (e.summary.passing_witness) s["passing_witness"] = *e.summary.passing_witness;
    return {{"components", comps}, {"summary", s}};
}

RunResult dispatch(const RunConfig& config) {
    RunResult out;
    OJson& report = out.report;
    report["tool"] = kVersion;
    report["command"] = to_string(config.command);
    report["config"] = config_json(config);
    std::vector<OJson> records;

    switch (config.command) {
        case Command::Verify:
        case Command::Report: {
            std::vector<Fixture> fixtures;
            for (const auto& p : resolve_fixtures(config)) fixtures.push_back(load_fixture(p));
            const auto results = run_checks(fixtures, config.workers);
            OJson per = OJson::array();
            for (std::size_t i = 0; i < fixtures.size(); ++i) {
                const auto name = display_name(fixtures[i].path);
                bool all = true;
                for (const auto& r : results[i]) {
                    records.push_back(record_json(name, r));
                    all = all && r.pass;
                }
                per.push_back({{"fixture", name}, {"type", fixtures[i].type},
                               {"checks", static_cast<long>(results[i].size())}, {"status", all ? "PASS" : "FAIL"}});
            }
            if (config.command == Command::Report) report["fixtures"] = per;
            break;
        }
        case Command::Evaluate: {
            const auto fx = single_fixture(config, "test");
            const auto t = in_context(fx.path, [&] { return test_from_json(fx.body); });
            const auto z = name_from_string(require(config.point, "--point"));
            const long depth = config.depth.value_or(t.max_index());
            report["result"] = evaluation_json(evaluate(t, z, depth));
            break;
        }
        case Command::Transport: {
            const auto fx = single_fixture(config, "measure");
            const auto mu = in_context(fx.path, [&] { return measure_from_json(fx.body); });
            const auto prefix = require(config.prefix, "--prefix");
            const auto t = transport(mu, prefix, config.depth.value_or(-1));
            report["result"] = {{"measure", mu.name()}, {"a_prefix", prefix}, {"c_prefix", t.c_prefix},
                                {"image", t.image.to_string()}, {"status", std::string(to_string(t.status))}};
            break;
        }
        case Command::Derive: {
            Json params;
            if (!config.fixtures.empty()) {
                params = single_fixture(config, "derivative").body;
            } else {
                params["function"] = require(config.function, "--function");
                params["point"] = require(config.point, "--point");
            }
            if (config.function) params["function"] = *config.function;
            if (config.point) params["point"] = *config.point;
            if (config.scale) params["scale"] = *config.scale;
            if (config.precision) params["grid"] = *config.precision;
            const auto f = function_from_json(params.at("function"));
            const auto z = name_from_string(params.at("point").get<std::string>());
            const auto e = pseudo_derivative(f, z, json_rational(params, "scale", Rational::pow2(-10)),
                                             json_long(params, "grid", 12));
            const Rational tol = json_rational(params, "tol", Rational::pow2(-4));
            report["result"] = estimate_json(e, classify_denjoy(e, tol), tol);
            break;
        }
        case Command::Tree: {
            const auto f = MarkovFunction::from_name(require(config.function, "--function"));
            const long n = config.n.value_or(0);
            const long depth = config.depth.value_or(8);
            const auto tree = oscillation_tree(f, n, depth);
            report["result"] = {{"function", f.name()}, {"n", n}, {"depth", depth},
                                {"size", static_cast<long>(tree.size())}, {"strings", tree}};
            break;
        }
        case Command::Convert: {
            const auto fx = single_fixture(config);
            TestFamily converted;
            if (fx.type == "limit_oracle") {
                const auto oracle = in_context(fx.path, [&] { return oracle_from_json(fx.body); });
                converted = schnorr_to_interval_sequence(oracle, config.depth.value_or(8));
            } else if (fx.type == "test") {
                const auto t = in_context(fx.path, [&] { return test_from_json(fx.body); });
                switch (t.kind) {
                    case TestKind::Solovay: converted = convert_solovay_to_ml(t, config.depth.value_or(t.max_index())); break;
                    case TestKind::IntervalSequence:
                        converted = interval_sequence_to_schnorr(t, config.depth.value_or(LONG_MAX));
                        break;
                    case TestKind::Pi1: {
                        const auto& d = *t.pi1;
                        converted = build_pi1_ml_test(d.q, d.c, config.depth.value_or(static_cast<long>(d.q.size()) - 1));
                        break;
                    }
                    default:
                        throw Error(ErrorKind::InvalidArgument,
                                    "no conversion from " + std::string(to_string(t.kind)));
                }
            } else {
                throw Error(ErrorKind::FixtureInvalid, fx.path + ": nothing to convert");
            }
            for (const auto& r : validate(converted).records) records.push_back(record_json("", r));
            report["result"] = OJson::parse(to_json(converted).dump());
            break;
        }
    }
    finish(report, records, out.exit_code);
    return out;
}

}  // namespace

Command parse_command(const std::string& name) {
    for (auto c : {Command::Verify, Command::Evaluate, Command::Transport, Command::Derive, Command::Tree,
                   Command::Convert, Command::Report}) {
        if (to_string(c) == name) return c;
    }
    throw Error(ErrorKind::ParseError, "unknown command \"" + name + "\"");
}

std::string to_string(Command c) {
    switch (c) {
        case Command::Verify: return "verify";
        case Command::Evaluate: return "evaluate";
        case Command::Transport: return "transport";
        case Command::Derive: return "derive";
        case Command::Tree: return "tree";
        case Command::Convert: return "convert";
        case Command::Report: return "report";
    }
    return "verify";
}

void validate_config(const RunConfig& c) {
    auto range = [](const std::optional<long>& v, long lo, long hi, const char* flag) {
        if (v && (*v < lo || *v > hi)) {
            throw Error(ErrorKind::BudgetExceeded, std::string(flag) + " = " + std::to_string(*v) + " outside [" +
                                                       std::to_string(lo) + "," + std::to_string(hi) + "]");
        }
    };
    range(c.depth, 0, 64, "--depth");
    range(c.precision, 0, 64, "--precision");
    range(c.n, 0, 64, "--n");
    if (c.command == Command::Tree) range(c.depth, 0, 16, "--depth");
    if (c.command == Command::Derive) range(c.precision, 0, 14, "--precision");
    if (c.command == Command::Convert) range(c.depth, 0, 60, "--depth");
    if (c.scale) {
        const Rational s = Rational::parse(*c.scale);
        if (s.sign() <= 0) throw Error(ErrorKind::InvalidArgument, "--scale must be positive");
    }
    if (c.format != "json" && c.format != "text") throw Error(ErrorKind::InvalidArgument, "--format must be json or text");
    if (c.prefix) require_bits(*c.prefix);
}

RunResult run(const RunConfig& config) {
    try {
        validate_config(config);
        return dispatch(config);
    } catch (const Error& e) {
        RunResult out;
        out.report["tool"] = kVersion;
        out.report["command"] = to_string(config.command);
        out.report["config"] = config_json(config);
        out.report["error"] = {{"kind", std::string(to_string(e.kind()))}, {"message", e.message()}};
        out.report["summary"] = {{"status", "ERROR"}};
        out.exit_code = 2;
        return out;
    }
}

std::string render(const OJson& report, const std::string& format) {
    if (format == "json") return report.dump(2) + "\n";
    std::ostringstream os;
    os << report["tool"].get<std::string>() << " " << report["command"].get<std::string>() << "\n";
    if (report.contains("error")) {
        os << "ERROR " << report["error"]["kind"].get<std::string>() << ": "
           << report["error"]["message"].get<std::string>() << "\n";
        return os.str();
    }
    for (const auto& r : report["records"]) {
        os << r["status"].get<std::string>() << " " << r["name"].get<std::string>();
        if (r.contains("detail")) os << ": " << r["detail"].get<std::string>();
        os << "\n";
    }
    if (report.contains("result")) os << report["result"].dump() << "\n";
    const auto& s = report["summary"];
    os << s["status"].get<std::string>() << " " << s["passed"].get<long>() << "/" << s["checks"].get<long>()
       << " checks passed\n";
    return os.str();
}

}  // namespace randlab::cli
