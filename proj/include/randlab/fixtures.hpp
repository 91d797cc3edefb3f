#pragma once

#include "randlab/cauchy.hpp"
#include "randlab/limit_oracle.hpp"
#include "randlab/markov.hpp"
#include "randlab/martingale.hpp"
#include "randlab/randomness.hpp"
#include "randlab/tt_measures.hpp"

#include <json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace randlab {

using Json = nlohmann::json;

struct Fixture {
    std::string path;
    std::string type;
    Json body;
};

/// Throws Error(ParseError) with the path on malformed JSON or a missing "type".
Fixture load_fixture(const std::string& path);

/// Regular *.json files directly inside `dir`, sorted by name.
std::vector<std::string> list_fixtures(const std::string& dir);

/// "const(p/q)", "scripted(p/q)", "sqrt2" or a bare rational (exact).
CauchyName name_from_string(std::string_view text);

IntervalUnion union_from_json(const Json& j);
/// A name string for MarkovFunction::from_name, or {"breakpoints": [[x, y], ...]}
/// with optional "name" and "modulus": "linear(p/q)" | "none".
MarkovFunction function_from_json(const Json& j);
StagedCover cover_from_json(const Json& j);
TestFamily test_from_json(const Json& j);
CylinderMeasure measure_from_json(const Json& j);
TTFunctional functional_from_json(const Json& j);
Martingale martingale_from_json(const Json& j);
LimitOracle<IntervalUnion> oracle_from_json(const Json& j);

/// Serialization of exact objects; rationals as "p/q".
Json to_json(const RationalInterval& i);
Json to_json(const IntervalUnion& u);
Json to_json(const TestFamily& t);

}  // namespace randlab
