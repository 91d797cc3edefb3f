#include "randlab/fixtures.hpp"

#include "randlab/errors.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace randlab {

namespace {

const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) {
        throw Error(ErrorKind::FixtureInvalid, std::string("missing field \"") + key + "\"");
    }
    return j.at(key);
}

std::string text(const Json& j, const char* what) {
    if (!j.is_string()) throw Error(ErrorKind::FixtureInvalid, std::string(what) + " must be a string");
    return j.get<std::string>();
}

Rational rational(const Json& j, const char* what) {
    if (j.is_number_integer()) return Rational(j.get<long>());
    return Rational::parse(text(j, what));
}

long integer(const Json& j, const char* what) {
    if (!j.is_number_integer()) throw Error(ErrorKind::FixtureInvalid, std::string(what) + " must be an integer");
    return j.get<long>();
}

long index_key(const std::string& key) {
    long v = 0;
    const auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), v);
    if (ec != std::errc() || ptr != key.data() + key.size()) {
        throw Error(ErrorKind::FixtureInvalid, "component key \"" + key + "\" is not an integer");
    }
    return v;
}

template <class F>
auto with_context(const std::string& ctx, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error(e.kind(), ctx + ": " + e.message());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::FixtureInvalid, ctx + ": " + e.what());
    }
}

std::string_view strip_call(std::string_view s, std::string_view fn) {
    if (s.size() > fn.size() + 2 && s.starts_with(fn) && s[fn.size()] == '(' && s.back() == ')') {
        return s.substr(fn.size() + 1, s.size() - fn.size() - 2);
    }
    return {};
}

}  // namespace

Fixture load_fixture(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ParseError, path + ": cannot open fixture");
    Fixture f;
    f.path = path;
    try {
        f.body = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::ParseError, path + ": " + e.what());
    }
    if (!f.body.is_object() || !f.body.contains("type") || !f.body["type"].is_string()) {
        throw Error(ErrorKind::ParseError, path + ": fixture needs a string field \"type\"");
    }
    f.type = f.body["type"].get<std::string>();
    return f;
}

std::vector<std::string> list_fixtures(const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<std::string> out;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") out.push_back(entry.path().generic_string());
    }
    if (ec) throw Error(ErrorKind::ParseError, dir + ": cannot list fixture directory");
    std::sort(out.begin(), out.end());
    return out;
}

CauchyName name_from_string(std::string_view s) {
    if (s == "sqrt2") return newton_sqrt2();
    if (auto arg = strip_call(s, "const"); !arg.empty()) return const_name(Rational::parse(arg));
    if (auto arg = strip_call(s, "scripted"); !arg.empty()) {
        return scripted_name({Rational::parse(arg)}, 0, "scripted(" + std::string(arg) + ")");
    }
    return const_name(Rational::parse(s));
}

IntervalUnion union_from_json(const Json& j) {
    if (!j.is_array()) throw Error(ErrorKind::FixtureInvalid, "interval list must be an array");
    std::vector<RationalInterval> parts;
    for (const auto& item : j) parts.push_back(RationalInterval::parse(text(item, "interval")));
    return normalize_union(parts);
}

MarkovFunction function_from_json(const Json& j) {
    if (j.is_string()) return MarkovFunction::from_name(j.get<std::string>());
    std::vector<Breakpoint> points;
    for (const auto& p : field(j, "breakpoints")) {
        if (!p.is_array() || p.size() != 2) throw Error(ErrorKind::FixtureInvalid, "breakpoint must be [x, y]");
        points.push_back({rational(p[0], "x"), rational(p[1], "y")});
    }
    auto f = MarkovFunction::polygonal(PolygonalFunction(std::move(points)));
    if (j.contains("modulus")) {
        const auto m = text(j["modulus"], "modulus");
        if (m == "none") {
            f = f.without_modulus();
        } else if (auto arg = strip_call(m, "linear"); !arg.empty()) {
            f = f.with_modulus(ModulusFunction::linear(Rational::parse(arg)));
        } else {
            throw Error(ErrorKind::FixtureInvalid, "unknown modulus \"" + m + "\"");
        }
    }
    return f;
}

StagedCover cover_from_json(const Json& j) {
    StagedCover c;
    for (const auto& stage : field(j, "stages")) {
        std::vector<RationalInterval> s;
        if (!stage.is_array()) throw Error(ErrorKind::FixtureInvalid, "cover stage must be an array");
        for (const auto& item : stage) s.push_back(RationalInterval::parse(text(item, "interval")));
        c.stages.push_back(std::move(s));
    }
    if (j.contains("size_bound")) {
        for (const auto& v : j["size_bound"]) c.size_bound.push_back(integer(v, "size_bound entry"));
    }
    return c;
}

TestFamily test_from_json(const Json& j) {
    TestFamily t;
    t.kind = parse_test_kind(text(field(j, "kind"), "kind"));
    t.label = j.value("label", std::string());
    t.relativized = j.value("relativized", false);
    t.claimed_universal = j.value("claimed_universal", false);

    if (j.contains("components")) {
        for (const auto& [key, value] : j["components"].items()) {
            const long m = index_key(key);
            with_context("component " + key, [&] {
                t.components[m] = {union_from_json(value)};
                return 0;
            });
        }
    }
    if (j.contains("versions")) {
        for (const auto& [key, value] : j["versions"].items()) {
            const long m = index_key(key);
            auto& list = t.components[m];
            list.clear();
            for (const auto& v : value) list.push_back(union_from_json(v));
        }
    }
    if (j.contains("declared_measures")) {
        for (const auto& [key, value] : j["declared_measures"].items()) {
            t.declared_measures[index_key(key)] = rational(value, "declared measure");
        }
    }
    if (j.contains("bound")) t.solovay_bound = rational(j["bound"], "bound");
    if (j.contains("budgets")) {
        for (const auto& [key, value] : j["budgets"].items()) t.budgets[index_key(key)] = integer(value, "budget");
    }
    if (j.contains("blocks")) {
        for (const auto& b : j["blocks"]) {
            IntervalSequenceBlock block;
            block.m = integer(field(b, "m"), "m");
            block.r = integer(field(b, "r"), "r");
            for (const auto& item : field(b, "intervals")) {
                block.intervals.push_back(RationalInterval::parse(text(item, "interval")));
            }
            if (b.contains("excised")) {
                for (const auto& k : b["excised"]) block.excised.insert(integer(k, "excised index"));
            }
            t.blocks.push_back(std::move(block));
        }
    }
    if (j.contains("pi1")) {
        const auto& p = j["pi1"];
        Pi1Data d;
        if (p.contains("q_rule")) {
            const auto& rule = p["q_rule"];
            if (text(field(rule, "rule"), "q rule") != "half_minus_pow2") {
                throw Error(ErrorKind::FixtureInvalid, "unknown q rule");
            }
            const long depth = integer(field(rule, "depth"), "depth");
            for (long n = 0; n <= depth; ++n) d.q.push_back(Rational(1, 2) - Rational::pow2(-n));
        } else {
            for (const auto& v : field(p, "q")) d.q.push_back(rational(v, "q"));
        }
        if (p.contains("c_rule")) {
            const auto& rule = p["c_rule"];
            if (text(field(rule, "rule"), "c rule") != "initial_segments") {
                throw Error(ErrorKind::FixtureInvalid, "unknown C rule");
            }
            const long count = integer(field(rule, "count"), "count");
            for (long m = 0; m < count; ++m) {
                std::set<long> cm;
                for (long n = 0; n <= m; ++n) cm.insert(n);
                d.c.push_back(std::move(cm));
            }
        } else {
            for (const auto& cm : field(p, "c")) {
                std::set<long> s;
                for (const auto& n : cm) s.insert(integer(n, "C entry"));
                d.c.push_back(std::move(s));
            }
        }
        t.pi1 = std::move(d);
    }
    refresh_derived_components(t);
    return t;
}

CylinderMeasure measure_from_json(const Json& j) {
    if (j.contains("table")) {
        std::map<BitString, Rational> table;
        for (const auto& [key, value] : j["table"].items()) table[key] = rational(value, "mass");
        return CylinderMeasure::from_table(std::move(table), j.value("label", std::string("table")));
    }
    if (j.contains("induced")) {
        const auto phi = functional_from_json(j["induced"]);
        return CylinderMeasure::induced(phi, integer(field(j, "depth"), "depth"));
    }
    const auto rule = text(field(j, "rule"), "rule");
    if (rule == "uniform") return CylinderMeasure::uniform();
    if (rule == "bernoulli") return CylinderMeasure::bernoulli(rational(field(j, "p"), "p"));
    throw Error(ErrorKind::FixtureInvalid, "unknown measure rule \"" + rule + "\"");
}

TTFunctional functional_from_json(const Json& j) {
    if (j.contains("tables")) {
        std::vector<long> use;
        std::vector<std::string> tables;
        for (const auto& u : field(j, "use_bound")) use.push_back(integer(u, "use bound"));
        for (const auto& t : j["tables"]) tables.push_back(text(t, "table"));
        return TTFunctional::table(std::move(use), std::move(tables), j.value("label", std::string("table")));
    }
    return TTFunctional::from_rule(text(field(j, "rule"), "rule"), integer(field(j, "outputs"), "outputs"));
}

Martingale martingale_from_json(const Json& j) {
    if (j.contains("table")) {
        std::map<BitString, Rational> table;
        for (const auto& [key, value] : j["table"].items()) table[key] = rational(value, "capital");
        return Martingale::from_table(table, j.value("label", std::string("table")));
    }
    return Martingale::from_rule(text(field(j, "rule"), "rule"), integer(field(j, "depth"), "depth"));
}

LimitOracle<IntervalUnion> oracle_from_json(const Json& j) {
    std::map<long, std::vector<IntervalUnion>> scripts;
    for (const auto& [key, stages] : field(j, "scripts").items()) {
        auto& s = scripts[index_key(key)];
        for (const auto& stage : stages) s.push_back(union_from_json(stage));
    }
    std::map<long, long> budgets;
    if (j.contains("budgets")) {
        for (const auto& [key, value] : j["budgets"].items()) budgets[index_key(key)] = integer(value, "budget");
    }
    return {std::move(scripts), std::move(budgets)};
}

Json to_json(const RationalInterval& i) { return i.to_string(); }

Json to_json(const IntervalUnion& u) {
    Json out = Json::array();
    for (const auto& p : u.parts()) out.push_back(p.to_string());
    return out;
}

Json to_json(const TestFamily& t) {
    Json out;
    out["type"] = "test";
    out["kind"] = std::string(to_string(t.kind));
    out["label"] = t.label;
    out["relativized"] = t.relativized;
    out["claimed_universal"] = t.claimed_universal;
    Json versions = Json::object();
    for (const auto& [m, list] : t.components) {
        Json vs = Json::array();
        for (const auto& v : list) vs.push_back(to_json(v));
        versions[std::to_string(m)] = vs;
    }
    out["versions"] = versions;
    if (!t.declared_measures.empty()) {
        Json d = Json::object();
        for (const auto& [m, v] : t.declared_measures) d[std::to_string(m)] = v.to_string();
        out["declared_measures"] = d;
    }
    if (t.solovay_bound) out["bound"] = t.solovay_bound->to_string();
    if (!t.budgets.empty()) {
        Json b = Json::object();
        for (const auto& [m, v] : t.budgets) b[std::to_string(m)] = v;
        out["budgets"] = b;
    }
    if (!t.blocks.empty()) {
        Json blocks = Json::array();
        for (const auto& b : t.blocks) {
            Json iv = Json::array();
            for (const auto& i : b.intervals) iv.push_back(i.to_string());
            blocks.push_back({{"m", b.m}, {"r", b.r}, {"intervals", iv}, {"excised", b.excised}});
        }
        out["blocks"] = blocks;
    }
    return out;
}

}  // namespace randlab
