#include "affine/io.hpp"

#include "affine/errors.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

namespace affine::io {

namespace {

void dump_into(const Json& value, int indent, int depth, std::string& out) {
    const bool pretty = indent >= 0;
    const auto newline = [&](int level) {
        if (!pretty) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * level), ' ');
    };
    switch (value.type()) {
        case Json::value_t::object: {
            if (value.empty()) {
                out += "{}";
                return;
            }
            out += '{';
            bool first = true;
            for (const auto& [key, item] : value.items()) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                out += Json(key).dump();
                out += pretty ? ": " : ":";
                dump_into(item, indent, depth + 1, out);
            }
            newline(depth);
            out += '}';
            return;
        }
        case Json::value_t::array: {
            if (value.empty()) {
                out += "[]";
                return;
            }
            // Numeric arrays stay on one line.
            const bool flat = std::all_of(value.begin(), value.end(), [](const Json& e) { return e.is_primitive(); });
            out += '[';
            bool first = true;
            for (const auto& item : value) {
                if (!first) out += pretty && flat ? ", " : ",";
                first = false;
                if (!flat) newline(depth + 1);
                dump_into(item, indent, depth + 1, out);
            }
            if (!flat) newline(depth);
            out += ']';
            return;
        }
        case Json::value_t::number_float: {
            const double v = value.get<double>();
            out += std::isfinite(v) ? format_number(v) : "null";
            return;
        }
        default: out += value.dump(); return;
    }
}

double number_at(const Json& j, std::string_view key, double fallback, std::string_view where) {
    if (!j.contains(key)) return fallback;
    const Json& v = j.at(std::string(key));
    if (!v.is_number()) throw ConfigError(std::string(where) + "." + std::string(key) + " must be a number");
    return v.get<double>();
}

const std::array<std::pair<DilatationalKind, std::string_view>, 4> kDilatationalNames{{
    {DilatationalKind::None, "None"},
    {DilatationalKind::HarmonicWell, "HarmonicWell"},
    {DilatationalKind::Box, "Box"},
    {DilatationalKind::SteepOscillator, "SteepOscillator"},
}};

}  // namespace

std::string format_number(double value) {
    if (std::isnan(value)) return "NaN";
    if (std::isinf(value)) return value > 0 ? "Infinity" : "-Infinity";
    std::array<char, 40> buffer{};
    const auto result = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value, std::chars_format::general, 17);
    return std::string(buffer.data(), result.ptr);
}

std::string dump(const Json& value, int indent) {
    std::string out;
    dump_into(value, indent, 0, out);
    return out;
}

void require_object(const Json& value, std::string_view where) {
    if (!value.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
}

void require_known_keys(const Json& object, std::initializer_list<std::string_view> allowed, std::string_view where) {
    require_object(object, where);
    for (const auto& [key, unused] : object.items()) {
        (void)unused;
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError("unknown key '" + key + "' in " + std::string(where));
    }
}

Json to_json(const Vector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Json to_json(const Matrix& m) {
    Json out = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        out.push_back(row);
    }
    return out;
}

Vector vector_from_json(const Json& j, std::string_view where) {
    if (!j.is_array()) throw ConfigError(std::string(where) + " must be an array of numbers");
    Vector out(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw ConfigError(std::string(where) + " must be an array of numbers");
        out(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
    return out;
}

Matrix matrix_from_json(const Json& j, std::string_view where) {
    if (!j.is_array() || j.empty()) throw ConfigError(std::string(where) + " must be a non-empty array of rows");
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    Matrix out(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
        const Vector row = vector_from_json(j[r], where);
        if (static_cast<std::size_t>(row.size()) != cols || cols == 0)
            throw ConfigError(std::string(where) + " rows must have equal, nonzero length");
        out.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    return out;
}

Json to_json(const ModelSpec& model) {
    return Json{{"kind", std::string(to_string(model.kind))},
                {"m", model.m},
                {"I", model.I},
                {"A", model.A},
                {"B", model.B},
                {"I1", model.I1},
                {"I2", model.I2},
                {"a", model.a},
                {"b", model.b},
                {"c", model.c},
                {"d", model.d},
                {"hbar", model.hbar}};
}

ModelSpec model_from_json(const Json& j) {
    require_known_keys(j, {"kind", "m", "I", "A", "B", "I1", "I2", "a", "b", "c", "d", "hbar"}, "model");
    if (!j.contains("kind") || !j.at("kind").is_string()) throw ConfigError("model.kind must be a string");
    ModelSpec out;
    try {
        out.kind = model_kind_from_string(j.at("kind").get<std::string>());
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    out.m = number_at(j, "m", out.m, "model");
    out.I = number_at(j, "I", out.I, "model");
    out.A = number_at(j, "A", out.A, "model");
    out.B = number_at(j, "B", out.B, "model");
    out.I1 = number_at(j, "I1", out.I1, "model");
    out.I2 = number_at(j, "I2", out.I2, "model");
    out.a = number_at(j, "a", out.a, "model");
    out.b = number_at(j, "b", out.b, "model");
    out.c = number_at(j, "c", out.c, "model");
    out.d = number_at(j, "d", out.d, "model");
    out.hbar = number_at(j, "hbar", out.hbar, "model");
    return out;
}

Json to_json(const PotentialSpec& potential) {
    return Json{{"kind", std::string(to_string(potential.kind))},
                {"pairwise", std::string(to_string(potential.pairwise))},
                {"params",
                 {{"k", potential.k},
                  {"width", potential.width},
                  {"exponent", potential.exponent},
                  {"pair_k", potential.pair_k}}}};
}

PotentialSpec potential_from_json(const Json& j) {
    require_known_keys(j, {"kind", "k", "width", "exponent", "pairwise", "pair_k", "params"}, "potential");
    PotentialSpec out;
    // Parameters may sit in a params object or directly in the block, not both.
    Json params = Json::object();
    for (const char* key : {"k", "width", "exponent", "pair_k"})
        if (j.contains(key)) params[key] = j.at(key);
    if (j.contains("params")) {
        const Json& nested = j.at("params");
        if (!nested.is_object()) throw ConfigError("potential.params must be an object");
        require_known_keys(nested, {"k", "width", "exponent", "pair_k"}, "potential.params");
        for (const auto& [key, value] : nested.items()) {
            if (params.contains(key)) throw ConfigError("potential." + key + " given twice");
            params[key] = value;
        }
    }
    if (j.contains("kind")) {
        if (!j.at("kind").is_string()) throw ConfigError("potential.kind must be a string");
        const auto name = j.at("kind").get<std::string>();
        const auto it = std::find_if(kDilatationalNames.begin(), kDilatationalNames.end(),
                                     [&](const auto& entry) { return entry.second == name; });
        if (it == kDilatationalNames.end()) throw ConfigError("unknown potential kind: " + name);
        out.kind = it->first;
    }
    if (j.contains("pairwise")) {
        if (!j.at("pairwise").is_string()) throw ConfigError("potential.pairwise must be a string");
        const auto name = j.at("pairwise").get<std::string>();
        if (name == "Harmonic") out.pairwise = PairwiseKind::Harmonic;
        else if (name != "None") throw ConfigError("unknown pairwise potential: " + name);
    }
    out.k = number_at(params, "k", out.k, "potential");
    out.width = number_at(params, "width", out.width, "potential");
    out.exponent = number_at(params, "exponent", out.exponent, "potential");
    out.pair_k = number_at(params, "pair_k", out.pair_k, "potential");
    if (out.kind == DilatationalKind::Box && !(out.width > 0.0)) throw ConfigError("box potential needs width > 0");
    return out;
}

Json to_json(const ReducedState& state) {
    return Json{{"q", to_json(state.q)},
                {"p", to_json(state.p)},
                {"M", to_json(state.M.dense())},
                {"N", to_json(state.N.dense())}};
}

namespace {

SkewMatrix skew_from_json(const Json& j, int n, std::string_view where) {
    if (j.is_array() && !j.empty() && j[0].is_array()) {
        const Matrix dense = matrix_from_json(j, where);
        if (dense.rows() != n || dense.cols() != n) throw ConfigError(std::string(where) + " must be n x n");
        if ((dense + dense.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, dense.cwiseAbs().maxCoeff()))
            throw ConfigError(std::string(where) + " must be skew-symmetric");
        return SkewMatrix::from_dense(dense);
    }
    const Vector upper = vector_from_json(j, where);
    if (upper.size() != SkewMatrix::pair_count(n))
        throw ConfigError(std::string(where) + " needs n(n-1)/2 upper-triangle entries");
    return SkewMatrix::from_upper(n, std::vector<double>(upper.data(), upper.data() + upper.size()));
}

}  // namespace

ReducedState state_from_json(const Json& j) {
    require_known_keys(j, {"q", "p", "M", "N"}, "initial");
    if (!j.contains("q")) throw ConfigError("initial.q is required");
    const Vector q = vector_from_json(j.at("q"), "initial.q");
    const int n = static_cast<int>(q.size());
    if (n < 2) throw ConfigError("initial.q needs at least two entries");
    const Vector p = j.contains("p") ? vector_from_json(j.at("p"), "initial.p") : Vector::Zero(n);
    if (p.size() != n) throw ConfigError("initial.p must match initial.q in length");
    const SkewMatrix M = j.contains("M") ? skew_from_json(j.at("M"), n, "initial.M") : SkewMatrix(n);
    const SkewMatrix N = j.contains("N") ? skew_from_json(j.at("N"), n, "initial.N") : SkewMatrix(n);
    return ReducedState(q, p, M, N);
}

std::string trajectory_header(int n) {
    std::string out = "t";
    for (int a = 1; a <= n; ++a) out += ",q" + std::to_string(a);
    for (int a = 1; a <= n; ++a) out += ",p" + std::to_string(a);
    for (const char* name : {"M", "N"})
        for (int a = 1; a <= n; ++a)
            for (int b = a + 1; b <= n; ++b) out += "," + std::string(name) + std::to_string(a) + std::to_string(b);
    return out + ",E,C2";
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
    if (trajectory.states.empty()) return;
    out << trajectory_header(trajectory.states.front().n()) << '\n';
    for (std::size_t k = 0; k < trajectory.size(); ++k) {
        std::string line = format_number(trajectory.times[k]);
        const Vector flat = trajectory.states[k].flatten();
        for (Eigen::Index i = 0; i < flat.size(); ++i) line += "," + format_number(flat(i));
        line += "," + format_number(trajectory.energy[k]);
        line += "," + format_number(trajectory.casimir[k]);
        out << line << '\n';
    }
}

Json to_json(const SpectralProblem& problem) {
    Json axes = Json::array();
    for (const Axis& axis : problem.axes) axes.push_back(Json{{"min", axis.min}, {"max", axis.max}, {"points", axis.points}});
    return Json{{"n", problem.n},
                {"model", to_json(problem.model)},
                {"potential", to_json(problem.potential)},
                {"alpha_label", 0.5 * problem.twice_alpha},
                {"beta_label", 0.5 * problem.twice_beta},
                {"covering", problem.covering},
                {"mode", std::string(to_string(problem.mode))},
                {"axes", axes},
                {"boundary", std::string(to_string(problem.boundary))},
                {"use_amended_transform", problem.use_amended_transform},
                {"chamber", problem.chamber}};
}

Json spectrum_to_json(const SpectralProblem& problem, const Spectrum& spectrum) {
    const Grid grid(problem);
    Json axes = Json::array();
    for (int k = 0; k < grid.dimensions(); ++k) {
        const Axis& axis = grid.axes()[static_cast<std::size_t>(k)];
        axes.push_back(Json{{"min", axis.min}, {"max", axis.max}, {"points", axis.points}, {"step", grid.step(k)}});
    }
    return Json{{"problem", to_json(problem)},
                {"eigenvalues", spectrum.eigenvalues},
                {"residuals", spectrum.residuals},
                {"spectral_radius", spectrum.spectral_radius},
                {"grid", Json{{"axes", axes}, {"active_nodes", grid.active()}}},
                {"boundary", std::string(to_string(problem.boundary))}};
}

void write_eigenvector_csv(std::ostream& out, const Amplitude& amplitude) {
    out << "node,m,k,real,imag\n";
    for (int node = 0; node < amplitude.nodes(); ++node)
        for (int c = 0; c < amplitude.cols; ++c)
            for (int r = 0; r < amplitude.rows; ++r) {
                const Complex v = amplitude.at(node, r, c);
                out << node << ',' << r << ',' << c << ',' << format_number(v.real()) << ',' << format_number(v.imag())
                    << '\n';
            }
}

Json to_json(const BracketReport& report) {
    return Json{{"trials", report.trials},
                {"seed", report.seed},
                {"antisymmetry", report.antisymmetry},
                {"jacobi", report.jacobi},
                {"leibniz", report.leibniz},
                {"spin_cross", report.spin_cross},
                {"max_residual", report.max_residual()},
                {"passed", report.passed()}};
}

Json to_json(const PlanarClassification& classification) {
    Json out{{"verdict", std::string(to_string(classification.verdict))},
             {"m", classification.m},
             {"n", classification.n_coupling}};
    if (classification.turning_points)
        out["turning_points"] = Json::array({classification.turning_points->first, classification.turning_points->second});
    return out;
}

}  // namespace affine::io
