#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "randlab/interval.hpp"
#include "randlab/labcli.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace randlab;
using namespace randlab::cli;

namespace {

const std::string kRoot = RANDLAB_FIXTURE_ROOT;

RunConfig config_for(Command c, std::vector<std::string> fixtures) {
    RunConfig cfg;
    cfg.command = c;
    cfg.fixtures = std::move(fixtures);
    return cfg;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int shell(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("verify on the prefix-interval ML fixture passes") {
    const auto r = run(config_for(Command::Verify, {kRoot + "/ml_prefix_intervals.json"}));
    CHECK(r.exit_code == 0);
    CHECK(r.report["summary"]["status"] == "PASS");
    CHECK(r.report["records"].size() == 10);
}

TEST_CASE("verify on the broken Schnorr fixture names m and both rationals") {
    const auto r = run(config_for(Command::Verify, {kRoot + "/broken/schnorr_declared_mismatch.json"}));
    CHECK(r.exit_code == 1);
    bool found = false;
    for (const auto& rec : r.report["records"]) {
        if (rec["status"] == "FAIL") {
            found = true;
            CHECK(rec["name"] == "schnorr_declared_mismatch.json:declared_measure[m=2]");
            CHECK(rec["values"]["declared"] == "1/3");
            CHECK(rec["values"]["actual"] == "1/4");
        }
    }
    CHECK(found);
}

TEST_CASE("transport report carries the exact image") {
    auto cfg = config_for(Command::Transport, {kRoot + "/measure_bernoulli_3_4.json"});
    cfg.prefix = "111";
    const auto r = run(cfg);
    CHECK(r.exit_code == 0);
    const auto& res = r.report["result"];
    CHECK(res["c_prefix"].get<std::string>().starts_with("1"));
    CHECK(RationalInterval::parse(res["image"].get<std::string>()) ==
          RationalInterval::half_open(Rational(37, 64), Rational(1)));
}

TEST_CASE("budget and input errors exit with 2") {
    auto tree = config_for(Command::Tree, {});
    tree.function = "identity";
    tree.depth = 30;
    const auto r = run(tree);
    CHECK(r.exit_code == 2);
    CHECK(r.report["error"]["kind"] == "BudgetExceeded");

    const auto path = (std::filesystem::temp_directory_path() / "randlab_bad_fixture.json").string();
    std::ofstream(path) << "{ \"type\": ";
    const auto p = run(config_for(Command::Verify, {path}));
    CHECK(p.exit_code == 2);
    CHECK(p.report["error"]["kind"] == "ParseError");

    std::ofstream(path) << R"({"type": "test", "kind": "ML", "components": {"x": []}})";
    const auto f = run(config_for(Command::Verify, {path}));
    CHECK(f.exit_code == 2);
    CHECK(f.report["error"]["kind"] == "FixtureInvalid");
    std::filesystem::remove(path);
}

TEST_CASE("reports do not depend on worker count") {
    auto a = config_for(Command::Report, {kRoot});
    auto b = a;
    b.workers = 6;
    const auto ra = render(run(a).report, "json");
    const auto rb = render(run(b).report, "json");
    CHECK(ra == rb);
    CHECK(render(run(a).report, "text") == render(run(b).report, "text"));
}

TEST_CASE("the binary writes identical files and maps exit codes") {
    const std::string bin = RANDLAB_LABCLI_PATH;
    const auto dir = std::filesystem::temp_directory_path();
    const auto one = (dir / "randlab_cli_1.json").string();
    const auto two = (dir / "randlab_cli_2.json").string();
    CHECK(shell(bin + " verify --fixture " + kRoot + " --workers 1 --out " + one) == 0);
    CHECK(shell(bin + " verify --fixture " + kRoot + " --workers 4 --out " + two) == 0);
    CHECK(slurp(one) == slurp(two));
    CHECK(shell(bin + " verify --fixture " + kRoot + "/broken --out " + one) == 1);
    CHECK(shell(bin + " tree --function identity --depth 40 --out " + one + " 2>/dev/null") == 2);
    CHECK(shell(bin + " bogus >/dev/null 2>&1") == 2);
    std::filesystem::remove(one);
    std::filesystem::remove(two);
}

TEST_CASE("the fixture directory comes from the environment") {
    ::setenv(kFixtureDirEnv, (kRoot + "/broken").c_str(), 1);
    const auto r = run(config_for(Command::Verify, {}));
    ::unsetenv(kFixtureDirEnv);
    CHECK(r.exit_code == 1);
    CHECK(r.report["summary"]["checks"] == 11);
}
