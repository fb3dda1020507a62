#pragma once

#include "affine/io.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace affine::cli {

inline constexpr std::string_view kCommands[] = {"simulate",       "geodesic",    "classify",
                                                 "spectrum",       "check-brackets", "check-decomp"};

struct RunConfig {
    std::string command;
    io::Json model;      // null when absent
    io::Json potential;
    io::Json initial;
    io::Json numerics;
    io::Json output;
    std::optional<std::uint64_t> seed;
};

// ConfigError on malformed JSON, unknown top-level keys or an unknown command.
RunConfig parse_config(const io::Json& document);
RunConfig load_config(const std::filesystem::path& path);

struct RunOptions {
    std::filesystem::path output_dir = ".";
    std::optional<std::uint64_t> seed;  // overrides the config seed
    bool quiet = false;
};

// Exit status: 0 success, 1 a verification command found a failing residual,
// 2 configuration error, 3 domain error, 4 numeric error.
int run(const std::string& command, const std::filesystem::path& config_path, const RunOptions& options,
        std::ostream& out, std::ostream& err);
int run(const RunConfig& config, const RunOptions& options, std::ostream& out);

}  // namespace affine::cli
