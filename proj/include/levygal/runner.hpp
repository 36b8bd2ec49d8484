#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace levygal {

enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,
    exit_config = 2,
    exit_numerical = 3,
    exit_property = 4,
};

struct RunOptions {
    std::string subcommand;
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<int> paths;
    bool quiet = false;
    /// reproduce: manifest to replay.
    std::string manifest_path;
};

const std::vector<std::string>& subcommands();

/// Runs one subcommand from a config text, writes its artifacts plus
/// manifest.json into out_dir and returns the exit status.
int run_from_text(const RunOptions& options, const std::string& config_text, std::ostream& log);

/// Loads the config file and calls run_from_text; `reproduce` replays a
/// manifest and compares digests.
int run(const RunOptions& options, std::ostream& log);

std::string version_string();

}  // namespace levygal
