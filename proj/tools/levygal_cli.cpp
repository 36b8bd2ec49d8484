#include <iostream>

#include <CLI11.hpp>

#include "levygal/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Spectral-Galerkin laboratory for monotone SPDEs with Levy noise"};
    app.set_version_flag("--version", levygal::version_string());

    levygal::RunOptions options;
    std::uint64_t seed = 0;
    int paths = 0;
    app.add_option("subcommand", options.subcommand, "simulate | properties | converge | uniqueness | moments | "
                                                     "occupancy | seminorm | reproduce")
        ->required()
        ->check(CLI::IsMember(levygal::subcommands()));
    app.add_option("--config", options.config_path, "run configuration (key = value lines)");
    app.add_option("--out", options.out_dir, "output directory")->capture_default_str();
    auto* seed_opt = app.add_option("--seed", seed, "override the config seed");
    auto* paths_opt = app.add_option("--paths", paths, "override study.paths");
    app.add_option("--manifest", options.manifest_path, "manifest.json to replay (reproduce)");
    app.add_flag("--quiet", options.quiet, "suppress progress output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : levygal::exit_usage;
    }
    if (*seed_opt) options.seed = seed;
    if (*paths_opt) options.paths = paths;
    if (options.subcommand != "reproduce" && options.config_path.empty()) {
        std::cerr << "error: --config is required for " << options.subcommand << '\n';
        return levygal::exit_usage;
    }
    return levygal::run(options, std::cerr);
}
