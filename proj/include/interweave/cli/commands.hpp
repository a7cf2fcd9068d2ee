#pragma once

// Subcommands of the interweave tool. Each writes its tables under the
// output directory and returns a process exit code.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "interweave/cli/config.hpp"

namespace interweave::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 1,
    kExitInvariant = 2,
    kExitStatistical = 3,
};

std::string_view tool_version();

struct RunOptions {
    std::optional<std::string> out_dir;  // overrides output.dir
    std::optional<std::uint64_t> seed;   // overrides seed
    std::optional<int> threads;          // overrides threads
    bool svg = false;
};

struct Provenance {
    std::string command;
    std::string config_hash;
    std::uint64_t seed = 0;
};

// Config with command-line overrides applied.
Config effective_config(Config config, const RunOptions& options);

// Hash of the canonical config text, ignoring where outputs go.
std::string config_hash(const Config& config);

// Runs `command` ("eta-sweep", "rate-region", "admissible-grid",
// "detector-roc" or "simulate"). Warnings and errors go to `log`.
int run_command(std::string_view command, const Config& config, const RunOptions& options,
                std::ostream& log);

// Loads the config file first; a missing or malformed file gives kExitConfig.
int run_command_file(std::string_view command, const std::string& config_path,
                     const RunOptions& options, std::ostream& log);

const std::vector<std::string>& command_names();

} // namespace interweave::cli
