#include "cli.hpp"

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "masim/errors.hpp"
#include "masim/scenario.hpp"

namespace masim {

namespace {

struct Options {
    std::string config;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<double> grid;
};

void add_common(CLI::App* sub, Options& opt) {
    sub->add_option("--config", opt.config, "Scenario JSON file")->required();
    sub->add_option("--out-dir", opt.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--seed", opt.seed, "Override optimizer.seed");
    sub->add_option("--grid", opt.grid, "Override candidate grid points per wavelength")
        ->check(CLI::PositiveNumber);
}

}  // namespace

int cli_main(int argc, char** argv) {
    CLI::App app{"Movable-antenna array simulator", "masim"};
    app.require_subcommand(1);
    Options opt;
    const std::pair<const char*, const char*> commands[] = {
        {"beampattern", "1D beam patterns for a fixed ULA with zero forcing and an optimized movable array"},
        {"focusmap", "near-field focus maps for each moving-region size"},
        {"secrecy", "secrecy rate versus antenna count for movable, sparse and dense arrays"},
        {"optimize", "run the configured optimizer and write the placement"},
    };
    for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        auto cfg = load_config(opt.config);
        if (opt.seed) cfg.params.seed = *opt.seed;
        if (opt.grid) cfg.params.grid_points_per_wavelength = *opt.grid;

        ExperimentReport report;
        if (command == "beampattern") {
            report = run_beampattern(cfg, opt.out_dir);
        } else if (command == "focusmap") {
            report = run_focusmap(cfg, opt.out_dir);
        } else if (command == "secrecy") {
            report = run_secrecy_sweep(cfg, opt.out_dir);
        } else {
            report = run_optimize(cfg, opt.out_dir);
        }
        for (const auto& f : report.files) std::cout << f.name << "  " << f.sha256 << '\n';
        std::cout << "report.json written to " << opt.out_dir << " (" << report.wall_clock_s << " s)\n";
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << command << " failed: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << command << " failed: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace masim
