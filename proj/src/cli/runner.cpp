#include "affine/cli.hpp"
#include "affine/errors.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace affine::cli {

namespace {

using io::Json;

constexpr std::uint64_t kDefaultSeed = 1;

void allow_blocks(const RunConfig& config, std::initializer_list<std::string_view> used) {
    const std::pair<std::string_view, const Json*> blocks[] = {{"model", &config.model},
                                                              {"potential", &config.potential},
                                                              {"initial", &config.initial},
                                                              {"numerics", &config.numerics}};
    for (const auto& [name, block] : blocks) {
        if (block->is_null()) continue;
        if (std::find(used.begin(), used.end(), name) == used.end())
            throw ConfigError("block '" + std::string(name) + "' is not used by " + config.command);
    }
}

const Json& block_or_empty(const Json& block) {
    static const Json empty = Json::object();
    return block.is_null() ? empty : block;
}

double number(const Json& j, std::string_view key, double fallback, std::string_view where) {
    if (!j.contains(key)) return fallback;
    const Json& v = j.at(std::string(key));
    if (!v.is_number()) throw ConfigError(std::string(where) + "." + std::string(key) + " must be a number");
    return v.get<double>();
}

double required_number(const Json& j, std::string_view key, std::string_view where) {
    if (!j.contains(key)) throw ConfigError(std::string(where) + "." + std::string(key) + " is required");
    return number(j, key, 0.0, where);
}

int integer(const Json& j, std::string_view key, int fallback, std::string_view where) {
    if (!j.contains(key)) return fallback;
    const Json& v = j.at(std::string(key));
    if (!v.is_number_integer()) throw ConfigError(std::string(where) + "." + std::string(key) + " must be an integer");
    return v.get<int>();
}

bool boolean(const Json& j, std::string_view key, bool fallback, std::string_view where) {
    if (!j.contains(key)) return fallback;
    const Json& v = j.at(std::string(key));
    if (!v.is_boolean()) throw ConfigError(std::string(where) + "." + std::string(key) + " must be a boolean");
    return v.get<bool>();
}

std::string text(const Json& j, std::string_view key, std::string_view fallback, std::string_view where) {
    if (!j.contains(key)) return std::string(fallback);
    const Json& v = j.at(std::string(key));
    if (!v.is_string()) throw ConfigError(std::string(where) + "." + std::string(key) + " must be a string");
    return v.get<std::string>();
}

ModelSpec model_of(const RunConfig& config) {
    if (config.model.is_null()) throw ConfigError(config.command + " needs a model block");
    return io::model_from_json(config.model);
}

PotentialSpec potential_of(const RunConfig& config) {
    return config.potential.is_null() ? PotentialSpec{} : io::potential_from_json(config.potential);
}

struct OutputTarget {
    std::filesystem::path path;
    std::string format;
};

OutputTarget output_of(const RunConfig& config, const RunOptions& options, std::string_view default_name,
                       std::string_view default_format, std::initializer_list<std::string_view> formats) {
    const Json& block = block_or_empty(config.output);
    io::require_known_keys(block, {"path", "format"}, "output");
    OutputTarget target{text(block, "path", default_name, "output"), text(block, "format", default_format, "output")};
    if (std::find(formats.begin(), formats.end(), target.format) == formats.end())
        throw ConfigError("output.format '" + target.format + "' is not available for " + config.command);
    if (target.path.is_relative()) target.path = options.output_dir / target.path;
    if (target.path.has_parent_path()) std::filesystem::create_directories(target.path.parent_path());
    return target;
}

void write_text(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << body;
}

std::string fmt(double v) { return io::format_number(v); }

int twice_label(const Json& numerics, std::string_view key) {
    const double value = number(numerics, key, 0.0, "numerics");
    const double twice = 2.0 * value;
    if (std::abs(twice - std::round(twice)) > 1e-12) throw InvalidLabel(std::string(key) + " must be a multiple of 1/2");
    return static_cast<int>(std::lround(twice));
}

int run_simulate(const RunConfig& config, const RunOptions& options, std::ostream& out) {
    allow_blocks(config, {"model", "potential", "initial", "numerics"});
    const ModelSpec model = model_of(config);
    const PotentialSpec potential = potential_of(config);
    if (config.initial.is_null()) throw ConfigError("simulate needs an initial block");
    const ReducedState initial = io::state_from_json(config.initial);
    const Json& numerics = block_or_empty(config.numerics);
    io::require_known_keys(numerics,
                           {"step", "t_end", "adaptive", "relative_tolerance", "absolute_tolerance", "min_step",
                            "sample_every", "energy_tolerance"},
                           "numerics");
    StepControl control;
    control.step = number(numerics, "step", control.step, "numerics");
    control.adaptive = boolean(numerics, "adaptive", control.adaptive, "numerics");
    control.relative_tolerance = number(numerics, "relative_tolerance", control.relative_tolerance, "numerics");
    control.absolute_tolerance = number(numerics, "absolute_tolerance", control.absolute_tolerance, "numerics");
    control.min_step = number(numerics, "min_step", control.min_step, "numerics");
    control.sample_every = integer(numerics, "sample_every", control.sample_every, "numerics");
    control.energy_tolerance = number(numerics, "energy_tolerance", control.energy_tolerance, "numerics");
    const double t_end = required_number(numerics, "t_end", "numerics");

    const OutputTarget target = output_of(config, options, "trajectory.csv", "csv", {"csv", "json"});
    const Trajectory trajectory = integrate(model, potential, initial, t_end, control);
    if (target.format == "csv") {
        std::ofstream file(target.path);
        if (!file) throw ConfigError("cannot write " + target.path.string());
        io::write_trajectory_csv(file, trajectory);
    } else {
        Json records = Json::array();
        for (std::size_t k = 0; k < trajectory.size(); ++k)
            records.push_back(Json{{"t", trajectory.times[k]},
                                   {"state", io::to_json(trajectory.states[k])},
                                   {"E", trajectory.energy[k]},
                                   {"C2", trajectory.casimir[k]}});
        write_text(target.path, io::dump(Json{{"model", io::to_json(model)},
                                              {"potential", io::to_json(potential)},
                                              {"energy_drift", trajectory.energy_drift()},
                                              {"casimir_drift", trajectory.casimir_drift()},
                                              {"conforming", trajectory.conforming},
                                              {"records", records}}) +
                                     "\n");
    }
    out << "simulate samples=" << trajectory.size() << " energy_drift=" << fmt(trajectory.energy_drift())
        << " casimir_drift=" << fmt(trajectory.casimir_drift())
        << " conforming=" << (trajectory.conforming ? "true" : "false") << " output=" << target.path.string() << '\n';
    return 0;
}

int run_geodesic(const RunConfig& config, const RunOptions& options, std::ostream& out) {
    allow_blocks(config, {"model", "initial", "numerics"});
    const ModelSpec model = model_of(config);
    if (config.initial.is_null()) throw ConfigError("geodesic needs an initial block with phi0 and Omega");
    io::require_known_keys(config.initial, {"phi0", "Omega"}, "initial");
    if (!config.initial.contains("phi0") || !config.initial.contains("Omega"))
        throw ConfigError("initial needs phi0 and Omega");
    const Matrix phi0 = io::matrix_from_json(config.initial.at("phi0"), "initial.phi0");
    const Matrix omega = io::matrix_from_json(config.initial.at("Omega"), "initial.Omega");
    const Json& numerics = block_or_empty(config.numerics);
    io::require_known_keys(numerics, {"t_end", "step", "sample_every", "tolerance"}, "numerics");
    StepControl control;
    control.step = number(numerics, "step", 1e-3, "numerics");
    control.sample_every = integer(numerics, "sample_every", 100, "numerics");
    const double t_end = number(numerics, "t_end", 1.0, "numerics");
    const double tolerance = number(numerics, "tolerance", 1e-6, "numerics");

    const OutputTarget target = output_of(config, options, "geodesic.json", "json", {"json"});
    const DualRouteReport report = geodesic_dual_route(model, phi0, omega, t_end, control);
    Json samples = Json::array();
    for (std::size_t k = 0; k < report.times.size(); ++k)
        samples.push_back(Json{{"t", report.times[k]},
                               {"error", report.errors[k]},
                               {"extracted", io::to_json(report.extracted[k])},
                               {"integrated", io::to_json(report.integrated[k])}});
    const bool agree = report.max_error < tolerance;
    write_text(target.path, io::dump(Json{{"model", io::to_json(model)},
                                          {"max_error", report.max_error},
                                          {"tolerance", tolerance},
                                          {"agree", agree},
                                          {"samples", samples}}) +
                                 "\n");
    out << "geodesic samples=" << report.times.size() << " max_error=" << fmt(report.max_error)
        << " agree=" << (agree ? "true" : "false") << " output=" << target.path.string() << '\n';
    return agree ? 0 : 1;
}

int run_classify(const RunConfig& config, const RunOptions& options, std::ostream& out) {
    allow_blocks(config, {"model", "initial"});
    const double A = config.model.is_null() ? 1.0 : model_of(config).shear_inertia();
    if (config.initial.is_null()) throw ConfigError("classify needs an initial block with m and n");
    io::require_known_keys(config.initial, {"m", "n", "energy"}, "initial");
    const double m = required_number(config.initial, "m", "initial");
    const double n = required_number(config.initial, "n", "initial");
    std::optional<double> energy;
    if (config.initial.contains("energy")) energy = number(config.initial, "energy", 0.0, "initial");

    const OutputTarget target = output_of(config, options, "classify.json", "json", {"json"});
    const PlanarClassification verdict = classify_planar(m, n, energy, A);
    Json report = io::to_json(verdict);
    report["A"] = A;
    if (energy) report["energy"] = *energy;
    if (verdict.verdict == PlanarVerdict::Bounded) report["x_min"] = planar_potential_minimum(m, n, A);
    if (verdict.turning_points && energy) report["period"] = planar_period(m, n, A, *energy);
    write_text(target.path, io::dump(report) + "\n");
    out << "classify verdict=" << to_string(verdict.verdict) << " m=" << fmt(m) << " n=" << fmt(n);
    if (verdict.turning_points)
        out << " turning_points=" << fmt(verdict.turning_points->first) << "," << fmt(verdict.turning_points->second);
    out << " output=" << target.path.string() << '\n';
    return 0;
}

int run_spectrum(const RunConfig& config, const RunOptions& options, std::ostream& out) {
    allow_blocks(config, {"model", "potential", "numerics"});
    const Json& numerics = block_or_empty(config.numerics);
    io::require_known_keys(numerics,
                           {"n", "mode", "s", "j", "covering", "axes", "boundary", "amended", "chamber", "count",
                            "eigenvectors", "dense_limit"},
                           "numerics");
    SpectralProblem problem;
    problem.model = model_of(config);
    problem.potential = potential_of(config);
    problem.n = integer(numerics, "n", 2, "numerics");
    const std::string mode = text(numerics, "mode", "dilatational", "numerics");
    if (mode == "dilatational") problem.mode = GridMode::Dilatational;
    else if (mode == "shape") problem.mode = GridMode::Shape;
    else if (mode == "full") problem.mode = GridMode::Full;
    else throw ConfigError("numerics.mode must be dilatational, shape or full");
    problem.twice_alpha = twice_label(numerics, "s");
    problem.twice_beta = twice_label(numerics, "j");
    problem.covering = boolean(numerics, "covering", false, "numerics");
    const std::string boundary = text(numerics, "boundary", "dirichlet", "numerics");
    if (boundary == "dirichlet") problem.boundary = Boundary::Dirichlet;
    else if (boundary == "periodic") problem.boundary = Boundary::Periodic;
    else throw ConfigError("numerics.boundary must be dirichlet or periodic");
    problem.use_amended_transform = boolean(numerics, "amended", true, "numerics");
    problem.chamber = boolean(numerics, "chamber", true, "numerics");
    if (!numerics.contains("axes") || !numerics.at("axes").is_array())
        throw ConfigError("numerics.axes must be an array of {min, max, points}");
    problem.axes.clear();
    for (const Json& axis : numerics.at("axes")) {
        io::require_known_keys(axis, {"min", "max", "points"}, "numerics.axes[]");
        problem.axes.push_back(Axis{required_number(axis, "min", "numerics.axes[]"),
                                    required_number(axis, "max", "numerics.axes[]"),
                                    integer(axis, "points", 64, "numerics.axes[]")});
    }
    const int count = integer(numerics, "count", 5, "numerics");
    EigenOptions eig;
    eig.vectors = boolean(numerics, "eigenvectors", false, "numerics");
    eig.dense_limit = integer(numerics, "dense_limit", eig.dense_limit, "numerics");

    const OutputTarget target = output_of(config, options, "spectrum.json", "json", {"json"});
    const Spectrum spectrum = eigensolve(build_reduced_hamiltonian(problem), count, eig);
    write_text(target.path, io::dump(io::spectrum_to_json(problem, spectrum)) + "\n");
    for (std::size_t k = 0; k < spectrum.eigenvectors.size(); ++k) {
        std::ofstream file(target.path.parent_path() / ("eigenvector_" + std::to_string(k) + ".csv"));
        if (!file) throw ConfigError("cannot write eigenvector dump");
        io::write_eigenvector_csv(file, spectrum.eigenvectors[k]);
    }
    out << "spectrum count=" << count << " lowest=";
    for (std::size_t k = 0; k < spectrum.eigenvalues.size() && k < 3; ++k) out << (k ? "," : "") << fmt(spectrum.eigenvalues[k]);
    out << " output=" << target.path.string() << '\n';
    return 0;
}

std::uint64_t seed_of(const RunConfig& config, const RunOptions& options) {
    if (options.seed) return *options.seed;
    return config.seed.value_or(kDefaultSeed);
}

int run_check_brackets(const RunConfig& config, const RunOptions& options, std::ostream& out) {
    allow_blocks(config, {"numerics"});
    const Json& numerics = block_or_empty(config.numerics);
    io::require_known_keys(numerics, {"trials"}, "numerics");
    const int trials = integer(numerics, "trials", 200, "numerics");
    if (trials < 1) throw ConfigError("numerics.trials must be >= 1");
    const OutputTarget target = output_of(config, options, "brackets.json", "json", {"json"});
    const BracketReport report = check_brackets(seed_of(config, options), trials);
    write_text(target.path, io::dump(io::to_json(report)) + "\n");
    out << "check-brackets trials=" << trials << " max_residual=" << fmt(report.max_residual())
        << " passed=" << (report.passed() ? "true" : "false") << " output=" << target.path.string() << '\n';
    return report.passed() ? 0 : 1;
}

int run_check_decomp(const RunConfig& config, const RunOptions& options, std::ostream& out) {
    allow_blocks(config, {"numerics"});
    const Json& numerics = block_or_empty(config.numerics);
    io::require_known_keys(numerics, {"trials", "n", "max_condition"}, "numerics");
    const int trials = integer(numerics, "trials", 1000, "numerics");
    const int n = integer(numerics, "n", 0, "numerics");
    const double condition = number(numerics, "max_condition", 1e6, "numerics");
    if (trials < 1) throw ConfigError("numerics.trials must be >= 1");
    const OutputTarget target = output_of(config, options, "decomposition.json", "json", {"json"});
    const DecompositionReport report = check_decomposition(seed_of(config, options), trials, n, condition);
    write_text(target.path, io::dump(Json{{"trials", report.trials},
                                          {"seed", report.seed},
                                          {"reconstruction", report.reconstruction},
                                          {"orthogonality", report.orthogonality},
                                          {"singular_gap", report.singular_gap},
                                          {"passed", report.passed()}}) +
                                 "\n");
    out << "check-decomp trials=" << trials << " reconstruction=" << fmt(report.reconstruction)
        << " orthogonality=" << fmt(report.orthogonality) << " singular_gap=" << fmt(report.singular_gap)
        << " passed=" << (report.passed() ? "true" : "false") << " output=" << target.path.string() << '\n';
    return report.passed() ? 0 : 1;
}

}  // namespace

int run(const RunConfig& config, const RunOptions& options, std::ostream& out) {
    if (config.command == "simulate") return run_simulate(config, options, out);
    if (config.command == "geodesic") return run_geodesic(config, options, out);
    if (config.command == "classify") return run_classify(config, options, out);
    if (config.command == "spectrum") return run_spectrum(config, options, out);
    if (config.command == "check-brackets") return run_check_brackets(config, options, out);
    if (config.command == "check-decomp") return run_check_decomp(config, options, out);
    throw ConfigError("unknown command: " + config.command);
}

int run(const std::string& command, const std::filesystem::path& config_path, const RunOptions& options,
        std::ostream& out, std::ostream& err) {
    try {
        const RunConfig config = load_config(config_path);
        if (config.command != command)
            throw ConfigError("config declares command '" + config.command + "' but '" + command + "' was requested");
        std::ostringstream summary;
        const int status = run(config, options, summary);
        if (!options.quiet) out << summary.str();
        return status;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(e.family());
    } catch (const io::Json::exception& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(ErrorFamily::config);
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(ErrorFamily::config);
    }
}

}  // namespace affine::cli
