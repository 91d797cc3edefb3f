#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace randlab::cli {

inline constexpr const char* kVersion = "randlab 1.0.0";
inline constexpr const char* kFixtureDirEnv = "RANDLAB_FIXTURE_DIR";

enum class Command { Verify, Evaluate, Transport, Derive, Tree, Convert, Report };

Command parse_command(const std::string& name);
std::string to_string(Command c);

struct RunConfig {
    Command command = Command::Verify;
    std::vector<std::string> fixtures;  // files or directories; empty = default directory
    std::optional<long> depth;
    std::optional<long> precision;
    std::optional<std::string> scale;
    std::optional<std::string> point;
    std::optional<std::string> prefix;
    std::optional<std::string> function;
    std::optional<long> n;
    std::string format = "json";
    unsigned workers = 1;  // never echoed into reports
};

/// Exit codes: 0 all checks pass, 1 a check failed, 2 usage or input error.
struct RunResult {
    nlohmann::ordered_json report;
    int exit_code = 0;
};

/// Rejects out-of-budget parameters with Error(BudgetExceeded) before dispatch.
void validate_config(const RunConfig& config);

/// Never throws for fixture or budget problems: they become an error report
/// with exit code 2.
RunResult run(const RunConfig& config);

/// JSON (authoritative) or a derived text summary.
std::string render(const nlohmann::ordered_json& report, const std::string& format);

}  // namespace randlab::cli
