#include "affine/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Affine body dynamics and spectra"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::string output_dir = ".";
    std::uint64_t seed = 0;
    bool quiet = false;
    for (std::string_view name : affine::cli::kCommands) {
        CLI::App* sub = app.add_subcommand(std::string(name));
        sub->add_option("--config", config_path, "JSON run configuration")->required();
        sub->add_option("--output-dir", output_dir, "directory for artifacts");
        sub->add_option("--seed", seed, "seed for randomized checks (overrides the config)");
        sub->add_flag("--quiet", quiet, "suppress the summary line");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    const CLI::App* chosen = app.get_subcommands().front();
    affine::cli::RunOptions options;
    options.output_dir = output_dir;
    options.quiet = quiet;
    if (chosen->count("--seed") > 0) options.seed = seed;
    return affine::cli::run(chosen->get_name(), config_path, options, std::cout, std::cerr);
}
