#pragma once

#include "affine/dynamics.hpp"
#include "affine/poisson.hpp"
#include "affine/quantum.hpp"

#include <json.hpp>

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>

namespace affine::io {

using Json = nlohmann::json;

// Shortest-free, locale-independent rendering with 17 significant digits.
std::string format_number(double value);
// JSON text with every floating-point value at 17 significant digits.
std::string dump(const Json& value, int indent = 2);

// ConfigError naming the first key of `object` outside `allowed`.
void require_known_keys(const Json& object, std::initializer_list<std::string_view> allowed, std::string_view where);
void require_object(const Json& value, std::string_view where);

Json to_json(const Vector& v);
Json to_json(const Matrix& m);
Vector vector_from_json(const Json& j, std::string_view where);
Matrix matrix_from_json(const Json& j, std::string_view where);

Json to_json(const ModelSpec& model);
ModelSpec model_from_json(const Json& j);

Json to_json(const PotentialSpec& potential);
PotentialSpec potential_from_json(const Json& j);

// {"q": [...], "p": [...], "M": [[...]] or upper list, "N": ...}
Json to_json(const ReducedState& state);
ReducedState state_from_json(const Json& j);

std::string trajectory_header(int n);
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

Json to_json(const SpectralProblem& problem);
Json spectrum_to_json(const SpectralProblem& problem, const Spectrum& spectrum);
// One row per (node, m', k'): node,m,k,real,imag.
void write_eigenvector_csv(std::ostream& out, const Amplitude& amplitude);

Json to_json(const BracketReport& report);
Json to_json(const PlanarClassification& classification);

}  // namespace affine::io
