#pragma once

#include "affine/phase.hpp"

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace affine {

ReducedState eom_rhs(const ModelSpec& model, const PotentialSpec& potential, const ReducedState& state);

struct StepControl {
    double step = 1e-3;
    bool adaptive = false;
    double relative_tolerance = 1e-10;  // adaptive only
    double absolute_tolerance = 1e-12;  // adaptive only
    double min_step = 1e-12;            // adaptive only
    int sample_every = 1;               // fixed step only: record every k-th step
    double energy_tolerance = 1e-8;     // relative drift allowed before the run is flagged
};

struct Attitude {
    Matrix L;
    Matrix R;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<ReducedState> states;
    std::vector<double> energy;
    std::vector<double> casimir;
    std::vector<Attitude> attitudes;  // empty until reconstruct_attitudes
    bool conforming = true;

    std::size_t size() const { return times.size(); }
    double energy_drift() const;   // max relative |E(t) - E(0)|
    double casimir_drift() const;  // max relative |C(t) - C(0)|
};

Trajectory integrate(const ModelSpec& model, const PotentialSpec& potential, const ReducedState& initial,
                     double t_end, const StepControl& control = {});

// Independent trajectories run concurrently; the serial reference must agree exactly.
std::vector<Trajectory> integrate_sweep(const ModelSpec& model, const PotentialSpec& potential,
                                        std::span<const ReducedState> initial, double t_end,
                                        const StepControl& control = {});
std::vector<Trajectory> integrate_sweep_serial(const ModelSpec& model, const PotentialSpec& potential,
                                               std::span<const ReducedState> initial, double t_end,
                                               const StepControl& control = {});

// Propagates dL/dt = L chi, dR/dt = R theta along the samples of `trajectory`
// with chi, theta from the Hamiltonian gradient; L and R are re-projected each step.
Trajectory reconstruct_attitudes(const ModelSpec& model, const PotentialSpec& potential, Trajectory trajectory,
                                 const Matrix& L0, const Matrix& R0, int substeps = 1);

// phi_dot phi^-1 for the motion described by attitudes, invariants and velocities.
Matrix spatial_velocity(const Attitude& attitude, const Vector& q, const PolarVelocity& v);

// Two-polar invariants and velocities of a motion (phi, phi_dot).
struct PolarMotion {
    TwoPolar polar;
    PolarVelocity velocity;
};
PolarMotion polar_motion(const Matrix& phi, const Matrix& phi_dot, const TwoPolar* reference = nullptr);

Matrix expm(const Matrix& a);
Matrix geodesic_exponential(const Matrix& phi0, const Matrix& omega, double t);

// Reduced variables read off phi(t) = exp(Omega t) phi0 against direct integration (AffAff, no potential).
struct DualRouteReport {
    std::vector<double> times;
    std::vector<double> errors;  // max componentwise |extracted - integrated| per sample
    std::vector<ReducedState> extracted;
    std::vector<ReducedState> integrated;
    double max_error = 0.0;
};
DualRouteReport geodesic_dual_route(const ModelSpec& model, const Matrix& phi0, const Matrix& omega, double t_end,
                                    const StepControl& control = {});

struct StationaryVerdict {
    bool stationary;
    double residual;
};
StationaryVerdict stationary_check(const Matrix& x, ModelKind kind);

enum class PlanarVerdict { Bounded, Unbounded, Threshold };
std::string_view to_string(PlanarVerdict v);

struct PlanarClassification {
    PlanarVerdict verdict;
    double m;
    double n_coupling;
    std::optional<std::pair<double, double>> turning_points;
};

double planar_effective_potential(double m, double n_coupling, double A, double x);
PlanarClassification classify_planar(double m, double n_coupling, std::optional<double> energy = std::nullopt,
                                     double A = 1.0);

// Location of the minimum of the planar effective potential on x > 0 (bounded regime only).
double planar_potential_minimum(double m, double n_coupling, double A);
// Period of x(t) at energy E between the two turning points.
double planar_period(double m, double n_coupling, double A, double energy);

}  // namespace affine
