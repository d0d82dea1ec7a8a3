#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "mvdiv/commands.hpp"
#include "mvdiv/config.hpp"
#include "mvdiv/error.hpp"

#ifndef MVDIV_VERSION
#define MVDIV_VERSION "unknown"
#endif

namespace {

struct Invocation {
    std::string config_path;
    bool dump_config = false;
    bool no_timestamp = false;
    std::map<std::string, std::string> flags;
};

void add_run_options(CLI::App& sub, Invocation& inv) {
    sub.add_option("-c,--config", inv.config_path, "flat key = value config file");
    sub.add_flag("--dump-config", inv.dump_config, "print the resolved configuration and exit");
    sub.add_flag("--no-timestamp", inv.no_timestamp, "omit the generation time from CSV output");
    for (const auto& key : mvdiv::config_keys()) {
        sub.add_option_function<std::string>(
               "--" + key, [&inv, key](const std::string& v) { inv.flags[key] = v; }, "config key '" + key + "'")
            ->type_name("VALUE");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mean-variance equilibrium dividend barriers: solve, verify, simulate, sweep"};
    app.set_version_flag("--version", MVDIV_VERSION);
    app.require_subcommand(1);

    Invocation inv;
    const char* commands[][2] = {
        {"solve", "classify the regime and solve for the barrier"},
        {"verify", "check the HJB system for the solution on a grid"},
        {"simulate", "Monte Carlo estimates of the dividend moments"},
        {"sweep", "barrier table, value curves or barrier-function curves"},
        {"gamma-bar", "largest risk aversion with a concave barrier equilibrium"},
    };
    for (const auto& [name, help] : commands) add_run_options(*app.add_subcommand(name, help), inv);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return mvdiv::ExitConfig;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    mvdiv::RunConfig cfg;
    try {
        std::map<std::string, std::string> values;
        if (!inv.config_path.empty()) values = mvdiv::read_config_file(inv.config_path);
        for (const auto& [k, v] : inv.flags) values[k] = v;
        if (inv.no_timestamp) values["timestamp"] = "false";
        cfg = mvdiv::make_run_config(values);
    } catch (const mvdiv::Error& e) {
        std::cerr << "error [" << mvdiv::to_string(e.code()) << "]: " << e.what() << '\n';
        return mvdiv::ExitConfig;
    }

    if (inv.dump_config) {
        for (const auto& [k, v] : mvdiv::echo_config(cfg)) std::cout << k << " = " << v << '\n';
        return mvdiv::ExitOk;
    }
    return mvdiv::run_command(command, cfg, std::cout, std::cerr);
}
