#include "randlab/errors.hpp"
#include "randlab/labcli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
    using namespace randlab::cli;

    CLI::App app{"Exact checks for finite-stage randomness tests, transports and derivative estimates"};
    app.require_subcommand(1);
    RunConfig config;
    std::string out_path;
    long depth = 0;
    long precision = 0;
    long n = 0;
    std::string scale, point, prefix, function;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--fixture", config.fixtures, "Fixture file or directory (repeatable)");
        sub->add_option("--depth", depth, "Depth parameter");
        sub->add_option("--precision", precision, "Precision / grid exponent");
        sub->add_option("--scale", scale, "Scale h as p/q");
        sub->add_option("--point", point, "Point name: const(p/q), scripted(p/q), sqrt2 or p/q");
        sub->add_option("--prefix", prefix, "Input bit string");
        sub->add_option("--function", function, "Function name");
        sub->add_option("--n", n, "Tree threshold exponent");
        sub->add_option("--out", out_path, "Write the report here instead of stdout");
        sub->add_option("--format", config.format, "json or text")->check(CLI::IsMember({"json", "text"}));
        sub->add_option("--workers", config.workers, "Worker threads for independent checks");
    };

    const char* names[] = {"verify", "evaluate", "transport", "derive", "tree", "convert", "report"};
    for (const char* name : names) add_common(app.add_subcommand(name, std::string(name) + " subcommand"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    auto* sub = app.get_subcommands().front();
    config.command = parse_command(sub->get_name());
    if (sub->count("--depth")) config.depth = depth;
    if (sub->count("--precision")) config.precision = precision;
    if (sub->count("--n")) config.n = n;
    if (sub->count("--scale")) config.scale = scale;
    if (sub->count("--point")) config.point = point;
    if (sub->count("--prefix")) config.prefix = prefix;
    if (sub->count("--function")) config.function = function;

    const auto result = run(config);
    const auto text = render(result.report, config.format);
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) {
            std::cerr << "cannot write " << out_path << "\n";
            return 2;
        }
        out << text;
    }
    if (result.exit_code == 2 && result.report.contains("error")) {
        std::cerr << result.report["error"]["kind"].get<std::string>() << ": "
                  << result.report["error"]["message"].get<std::string>() << "\n";
    }
    return result.exit_code;
}
