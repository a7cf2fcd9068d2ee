// interweave: parameter sweeps, admissibility grids, detector ROCs and
// slot-level simulation for a primary/cognitive user pair.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "interweave/cli/commands.hpp"

int main(int argc, char** argv) {
    using namespace interweave::cli;

    CLI::App app{"Interweave cognitive radio toolkit"};
    app.set_version_flag("--version", std::string(tool_version()));
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int threads = 0;
    bool svg = false;
    app.add_option("--config", config_path, "JSON configuration file")->required();
    auto* out_opt = app.add_option("--out", out_dir, "output directory (overrides output.dir)");
    auto* seed_opt = app.add_option("--seed", seed, "random seed (overrides seed)");
    auto* threads_opt = app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_flag("--svg", svg, "also write SVG plots");
    app.fallthrough();

    for (const auto& name : command_names()) {
        app.add_subcommand(name, "");
    }
    app.get_subcommand("eta-sweep")->description("eta versus occupancy for several power ratios");
    app.get_subcommand("rate-region")->description("ideal and non-ideal rate-region polygons");
    app.get_subcommand("admissible-grid")->description("weak/strong admissibility lattice per p");
    app.get_subcommand("detector-roc")->description("detector ROCs against the weak boundary");
    app.get_subcommand("simulate")->description("slot-level Monte Carlo against the analytic rates");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    RunOptions options;
    if (*out_opt) options.out_dir = out_dir;
    if (*seed_opt) options.seed = seed;
    if (*threads_opt) options.threads = threads;
    options.svg = svg;
    const std::string command = app.get_subcommands().front()->get_name();
    return run_command_file(command, config_path, options, std::cerr);
}
