#pragma once

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "slowmotion/acceptance.hpp"
#include "slowmotion/commands.hpp"
#include "slowmotion/config.hpp"

namespace slowmotion::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 1;
inline constexpr int exit_numerical = 2;
inline constexpr int exit_criteria = 3;

/// Dispatches one command on a validated configuration.
inline int run(const std::string& command, const RunConfig& c, std::ostream& out) {
    if (command == "steady") commands::steady(c, out);
    else if (command == "family") commands::family(c, out);
    else if (command == "spectrum") commands::spectrum(c, out);
    else if (command == "evolve") commands::evolve(c, out);
    else if (command == "reduce") commands::reduce(c, out);
    else if (command == "sweep") commands::sweep(c, out);
    else if (command == "verify") {
        const auto results = acceptance::run_all(c.output_dir, out);
        std::size_t failed = 0;
        for (const auto& r : results) failed += r.pass ? 0 : 1;
        out << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed")) << '\n';
        return failed ? exit_criteria : exit_ok;
    } else {
        fail(ErrorKind::Config, "unknown command '" + command + "'");
    }
    return exit_ok;
}

/// Rewrites bare key=value tokens into --key=value so one parser handles both spellings.
inline std::vector<std::string> normalise_arguments(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a.rfind("-", 0) != 0 && a.find('=') != std::string::npos) a = "--" + a;
        args.push_back(a);
    }
    return args;
}

inline int main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Slow motion of interfaces in viscous scalar balance laws"};
    app.set_config("--config", "", "key = value configuration file");
    app.require_subcommand(1);
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
    for (const auto& k : config_keys()) {
        options[k.name] = app.add_option(std::string("--") + k.name, values[k.name],
                                         std::string(k.help) + " (default " +
                                             (*k.default_value ? k.default_value : "unset") + ")");
    }
    const char* names[][2] = {{"steady", "stationary branches"},
                              {"family", "approximate steady family over a xi lattice"},
                              {"spectrum", "linearized spectrum and gap report"},
                              {"evolve", "time evolution with interface tracking"},
                              {"reduce", "reduced interface ODE"},
                              {"sweep", "cross product of eps, xi and a0 lists"},
                              {"verify", "acceptance suite"}};
    for (const auto& n : names) app.add_subcommand(n[0], n[1])->fallthrough();

    std::vector<std::string> args = normalise_arguments(argc, argv);
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    }
    std::map<std::string, std::string> given;
    for (const auto& [name, opt] : options)
        if (opt->count() > 0) given[name] = values[name];

    try {
        const RunConfig c = make_config(given);
        return run(app.get_subcommands().front()->get_name(), c, out);
    } catch (const Error& e) {
        err << (e.kind() == ErrorKind::Config ? "config error: " : "numerical error [" + std::string(to_string(e.kind())) + "]: ")
            << e.what() << '\n';
        return e.kind() == ErrorKind::Config ? exit_config : exit_numerical;
    } catch (const std::exception& e) {
        err << "numerical error: " << e.what() << '\n';
        return exit_numerical;
    }
}

}  // namespace slowmotion::cli
