#include "fpme/cli/commands.hpp"
#include "fpme/cli/config.hpp"
#include "fpme/cli/plot.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

int main(int argc, char** argv) {
    using namespace fpme::cli;

    CLI::App app{"Signed fractional porous medium solver"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", FPME_VERSION_STRING);

    std::string config_file;
    app.add_option("-c,--config", config_file, "flat `key = value` config file");
    std::map<std::string, std::string> raw;
    for (const std::string& key : config_keys()) app.add_option("--" + key, raw[key], "override `" + key + "`");

    const std::vector<std::pair<std::string, std::string>> commands{
        {"ground-state", "Lane-Emden ground state, lambda1 and Lambda1"},
        {"evolve", "implicit time stepping with ledger and snapshots"},
        {"selection", "selection criterion, evolution and stabilization verdict"},
        {"landscape", "path profiles and string-method saddle estimate"},
        {"check", "inequality sampling and the invariant battery"},
    };
    for (const auto& [name, help] : commands) app.add_subcommand(name, help);
    std::string plot_dir;
    auto* plot = app.add_subcommand("plot-script", "write plot.py for the CSVs in a run directory");
    plot->add_option("dir", plot_dir, "run directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kSuccess : kConfigError;
    }

    if (plot->parsed()) {
        try {
            std::cout << emit_plot_script(plot_dir).string() << "\n";
            return kSuccess;
        } catch (const std::exception& e) {
            std::cerr << "fpme: " << e.what() << "\n";
            return kConfigError;
        }
    }

    FlagValues flags;
    for (const std::string& key : config_keys()) {
        if (app.count("--" + key) > 0) flags.emplace_back(key, raw[key]);
    }
    RunConfig config;
    try {
        config = parse_config(config_file.empty() ? std::nullopt : std::optional<std::filesystem::path>(config_file),
                              flags);
    } catch (const ConfigError& e) {
        std::cerr << "fpme: " << e.what() << "\n";
        return kConfigError;
    }
    return run_command(app.get_subcommands().front()->get_name(), config);
}
