#include "affine/cli.hpp"
#include "affine/errors.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace affine::cli {

RunConfig parse_config(const io::Json& document) {
    io::require_known_keys(document, {"command", "description", "model", "potential", "initial", "numerics", "output", "seed"},
                           "config");
    RunConfig config;
    if (!document.contains("command") || !document.at("command").is_string())
        throw ConfigError("config.command must be a string");
    config.command = document.at("command").get<std::string>();
    if (std::find(std::begin(kCommands), std::end(kCommands), config.command) == std::end(kCommands))
        throw ConfigError("unknown command: " + config.command);
    if (document.contains("description") && !document.at("description").is_string())
        throw ConfigError("config.description must be a string");
    for (auto [key, slot] : {std::pair{"model", &config.model}, std::pair{"potential", &config.potential},
                             std::pair{"initial", &config.initial}, std::pair{"numerics", &config.numerics},
                             std::pair{"output", &config.output}}) {
        if (!document.contains(key)) continue;
        io::require_object(document.at(key), std::string("config.") + key);
        *slot = document.at(key);
    }
    if (document.contains("seed")) {
        const io::Json& seed = document.at("seed");
        if (!seed.is_number_integer() || seed.get<long long>() < 0)
            throw ConfigError("config.seed must be a non-negative integer");
        config.seed = seed.get<std::uint64_t>();
    }
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    io::Json document;
    try {
        document = io::Json::parse(buffer.str());
    } catch (const io::Json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(document);
}

}  // namespace affine::cli
