#include "affine/dynamics.hpp"

#include "affine/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>

namespace affine {

namespace {

Matrix commutator(const Matrix& x, const Matrix& y) { return x * y - y * x; }

void wrap_if_circular(const ModelSpec& model, ReducedState& s) {
    if (model.kind != ModelKind::TrigUn) return;
    for (Eigen::Index a = 0; a < s.q.size(); ++a) s.q(a) = wrap_angle(s.q(a));
}

Vector flat_rhs(const ModelSpec& model, const PotentialSpec& potential, int n, const Vector& x) {
    return eom_rhs(model, potential, ReducedState::unflatten(n, x)).flatten();
}

double relative_drift(const std::vector<double>& series) {
    if (series.empty()) return 0.0;
    const double ref = series.front();
    const double scale = ref != 0.0 ? std::abs(ref) : 1.0;
    double worst = 0.0;
    for (double v : series) worst = std::max(worst, std::abs(v - ref) / scale);
    return worst;
}

void record(const ModelSpec& model, const PotentialSpec& potential, Trajectory& traj, double t,
            const ReducedState& s) {
    traj.times.push_back(t);
    traj.states.push_back(s);
    traj.energy.push_back(hamiltonian(model, potential, s));
    traj.casimir.push_back(casimir_csl2(s));
}

// Dormand-Prince 5(4) tableau.
constexpr std::array<double, 7> kC{0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr std::array<double, 7> kB5{35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr std::array<double, 7> kB4{5179.0 / 57600, 0.0,           7571.0 / 16695, 393.0 / 640,
                                    -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

Trajectory integrate_fixed(const ModelSpec& model, const PotentialSpec& potential, const ReducedState& initial,
                           double t_end, const StepControl& control) {
    const int n = initial.n();
    Trajectory traj;
    record(model, potential, traj, 0.0, initial);
    const auto steps = static_cast<long>(std::ceil(t_end / control.step - 1e-9));
    const int every = std::max(1, control.sample_every);
    Vector x = initial.flatten();
    double t = 0.0;
    for (long i = 1; i <= steps; ++i) {
        const double h = std::min(control.step, t_end - t);
        const Vector k1 = flat_rhs(model, potential, n, x);
        const Vector k2 = flat_rhs(model, potential, n, x + 0.5 * h * k1);
        const Vector k3 = flat_rhs(model, potential, n, x + 0.5 * h * k2);
        const Vector k4 = flat_rhs(model, potential, n, x + h * k3);
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t = i == steps ? t_end : t + h;
        ReducedState s = ReducedState::unflatten(n, x);
        wrap_if_circular(model, s);
        x = s.flatten();
        if (i % every == 0 || i == steps) record(model, potential, traj, t, s);
    }
    return traj;
}

Trajectory integrate_adaptive(const ModelSpec& model, const PotentialSpec& potential, const ReducedState& initial,
                              double t_end, const StepControl& control) {
    const int n = initial.n();
    Trajectory traj;
    record(model, potential, traj, 0.0, initial);
    Vector x = initial.flatten();
    double t = 0.0;
    double h = control.step;
    std::array<Vector, 7> k;
    while (t < t_end) {
        h = std::min(h, t_end - t);
        if (h < control.min_step) throw StepFailure("adaptive step underflow at t = " + std::to_string(t));
        double err = 0.0;
        Vector x5;
        bool stage_failed = false;
        try {
            for (int s = 0; s < 7; ++s) {
                Vector y = x;
                for (int j = 0; j < s; ++j) y += h * kA[s][j] * k[static_cast<std::size_t>(j)];
                k[static_cast<std::size_t>(s)] = flat_rhs(model, potential, n, y);
            }
        } catch (const DegenerateInertia&) {
            stage_failed = true;
        }
        if (!stage_failed) {
            x5 = x;
            Vector diff = Vector::Zero(x.size());
            for (std::size_t s = 0; s < 7; ++s) {
                x5 += h * kB5[s] * k[s];
                diff += h * (kB5[s] - kB4[s]) * k[s];
            }
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                const double scale = control.absolute_tolerance +
                                     control.relative_tolerance * std::max(std::abs(x(i)), std::abs(x5(i)));
                err = std::max(err, std::abs(diff(i)) / scale);
            }
            if (!std::isfinite(err)) stage_failed = true;
        }
        if (stage_failed) {
            h *= 0.25;
            continue;
        }
        if (err <= 1.0) {
            t += h;
            ReducedState s = ReducedState::unflatten(n, x5);
            wrap_if_circular(model, s);
            x = s.flatten();
            record(model, potential, traj, t, s);
        }
        const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        h *= factor;
    }
    return traj;
}

}  // namespace

ReducedState eom_rhs(const ModelSpec& model, const PotentialSpec& potential, const ReducedState& state) {
    const StateGradient g = hamiltonian_gradient(model, potential, state);
    const Matrix M = state.M.dense();
    const Matrix N = state.N.dense();
    const Matrix gM = g.dM.dense();
    const Matrix gN = g.dN.dense();
    ReducedState out(state.n());
    out.q = g.dp;
    out.p = -g.dq;
    out.M = SkewMatrix::from_dense(commutator(M, gM) + commutator(N, gN));
    out.N = SkewMatrix::from_dense(commutator(N, gM) + commutator(M, gN));
    return out;
}

double Trajectory::energy_drift() const { return relative_drift(energy); }
double Trajectory::casimir_drift() const { return relative_drift(casimir); }

Trajectory integrate(const ModelSpec& model, const PotentialSpec& potential, const ReducedState& initial,
                     double t_end, const StepControl& control) {
    if (!(t_end > 0.0)) throw DomainError("t_end must be positive");
    if (!(control.step > 0.0)) throw DomainError("step must be positive");
    model.validate(initial.n());
    Trajectory traj = control.adaptive ? integrate_adaptive(model, potential, initial, t_end, control)
                                       : integrate_fixed(model, potential, initial, t_end, control);
    traj.conforming = traj.energy_drift() <= control.energy_tolerance;
    return traj;
}

std::vector<Trajectory> integrate_sweep_serial(const ModelSpec& model, const PotentialSpec& potential,
                                               std::span<const ReducedState> initial, double t_end,
                                               const StepControl& control) {
    std::vector<Trajectory> out;
    out.reserve(initial.size());
    for (const auto& s : initial) out.push_back(integrate(model, potential, s, t_end, control));
    return out;
}

std::vector<Trajectory> integrate_sweep(const ModelSpec& model, const PotentialSpec& potential,
                                        std::span<const ReducedState> initial, double t_end,
                                        const StepControl& control) {
    std::vector<Trajectory> out(initial.size());
    const auto count = static_cast<std::ptrdiff_t>(initial.size());
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        try {
            const auto u = static_cast<std::size_t>(i);
            out[u] = integrate(model, potential, initial[u], t_end, control);
        } catch (...) {
#pragma omp critical(affine_sweep_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

Matrix spatial_velocity(const Attitude& attitude, const Vector& q, const PolarVelocity& v) {
    const Vector Q = q.array().exp().matrix();
    const Matrix theta = v.theta.dense();
    const Matrix inner = v.chi.dense() + Matrix(v.qdot.asDiagonal()) -
                         Q.asDiagonal() * theta * Q.cwiseInverse().asDiagonal();
    return attitude.L * inner * attitude.L.transpose();
}

PolarMotion polar_motion(const Matrix& phi, const Matrix& phi_dot, const TwoPolar* reference) {
    PolarMotion out;
    out.polar = reference ? two_polar_aligned(phi, *reference) : two_polar(phi);
    const int n = static_cast<int>(phi.rows());
    const Matrix& R = out.polar.R;
    const Matrix X = R.transpose() * phi.partialPivLu().solve(phi_dot) * R;
    out.velocity.qdot = X.diagonal();
    out.velocity.chi = SkewMatrix(n);
    out.velocity.theta = SkewMatrix(n);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            const double d = out.polar.q(a) - out.polar.q(b);
            if (std::abs(d) < 1e-9) throw DegenerateInertia("coincident invariants: two-polar velocities undefined");
            const double chi = -(X(a, b) + X(b, a)) / (2.0 * std::sinh(d));
            out.velocity.chi.set(a, b, chi);
            out.velocity.theta.set(a, b, std::exp(-d) * chi - X(a, b));
        }
    return out;
}

Trajectory reconstruct_attitudes(const ModelSpec& model, const PotentialSpec& potential, Trajectory trajectory,
                                 const Matrix& L0, const Matrix& R0, int substeps) {
    if (trajectory.size() == 0) return trajectory;
    const int n = trajectory.states.front().n();
    const auto d = trajectory.states.front().dimension();
    const auto nn = static_cast<Eigen::Index>(n) * n;

    // Extended state: flat reduced state, then L and R column-major.
    auto rhs = [&](const Vector& y) {
        const ReducedState s = ReducedState::unflatten(n, y.head(d));
        const PolarVelocity v = inverse_legendre(model, s);
        const Eigen::Map<const Matrix> L(y.data() + d, n, n);
        const Eigen::Map<const Matrix> R(y.data() + d + nn, n, n);
        Vector out(y.size());
        out.head(d) = eom_rhs(model, potential, s).flatten();
        Eigen::Map<Matrix>(out.data() + d, n, n) = L * v.chi.dense();
        Eigen::Map<Matrix>(out.data() + d + nn, n, n) = R * v.theta.dense();
        return out;
    };

    Matrix L = project_to_rotation(L0);
    Matrix R = project_to_rotation(R0);
    trajectory.attitudes.clear();
    trajectory.attitudes.push_back({L, R});
    const int sub = std::max(1, substeps);
    for (std::size_t i = 0; i + 1 < trajectory.size(); ++i) {
        const double h = (trajectory.times[i + 1] - trajectory.times[i]) / sub;
        Vector y(d + 2 * nn);
        y.head(d) = trajectory.states[i].flatten();
        for (int s = 0; s < sub; ++s) {
            Eigen::Map<Matrix>(y.data() + d, n, n) = L;
            Eigen::Map<Matrix>(y.data() + d + nn, n, n) = R;
            const Vector k1 = rhs(y);
            const Vector k2 = rhs(y + 0.5 * h * k1);
            const Vector k3 = rhs(y + 0.5 * h * k2);
            const Vector k4 = rhs(y + h * k3);
            y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            L = project_to_rotation(Eigen::Map<const Matrix>(y.data() + d, n, n));
            R = project_to_rotation(Eigen::Map<const Matrix>(y.data() + d + nn, n, n));
        }
        trajectory.attitudes.push_back({L, R});
    }
    return trajectory;
}

Matrix expm(const Matrix& a) {
    // Pade [13/13] with scaling and squaring.
    static constexpr std::array<double, 14> b{64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                              1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                              670442572800.0,      33522128640.0,       1323241920.0,
                                              40840800.0,          960960.0,            16380.0,
                                              182.0,               1.0};
    constexpr double theta13 = 5.371920351148152;
    if (!a.allFinite()) throw DomainError("matrix exponential of non-finite input");
    const auto n = a.rows();
    const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
    int s = 0;
    if (norm > theta13) s = static_cast<int>(std::ceil(std::log2(norm / theta13)));
    const Matrix A = a / std::ldexp(1.0, s);
    const Matrix I = Matrix::Identity(n, n);
    const Matrix A2 = A * A;
    const Matrix A4 = A2 * A2;
    const Matrix A6 = A4 * A2;
    const Matrix U = A * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I);
    const Matrix V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
    Matrix r = (V - U).partialPivLu().solve(V + U);
    for (int i = 0; i < s; ++i) r = r * r;
    return r;
}

Matrix geodesic_exponential(const Matrix& phi0, const Matrix& omega, double t) {
    if (!phi0.allFinite() || !omega.allFinite() || !std::isfinite(t))
        throw DomainError("geodesic input must be finite");
    return expm(omega * t) * phi0;
}

StationaryVerdict stationary_check(const Matrix& x, ModelKind) {
    const double residual = (x * x.transpose() - x.transpose() * x).norm();
    return {residual < 1e-10, residual};
}

DualRouteReport geodesic_dual_route(const ModelSpec& model, const Matrix& phi0, const Matrix& omega, double t_end,
                                    const StepControl& control) {
    if (model.kind != ModelKind::AffAff) throw DomainError("the exponential route holds for the AffAff geodetic model");
    if (omega.rows() != phi0.rows() || omega.cols() != phi0.cols())
        throw ShapeMismatch("Omega must match phi0 in shape");
    PolarMotion start = polar_motion(phi0, omega * phi0);
    const ReducedState initial = legendre(model, start.polar.q, start.velocity);
    DualRouteReport out;
    const Trajectory trajectory = integrate(model, PotentialSpec{}, initial, t_end, control);
    TwoPolar reference = start.polar;
    for (std::size_t k = 0; k < trajectory.size(); ++k) {
        const double t = trajectory.times[k];
        const Matrix phi = geodesic_exponential(phi0, omega, t);
        // Column signs follow the previous sample so M and N stay continuous.
        const PolarMotion motion = polar_motion(phi, omega * phi, &reference);
        reference = motion.polar;
        ReducedState extracted = legendre(model, motion.polar.q, motion.velocity);
        const double error = (extracted.flatten() - trajectory.states[k].flatten()).cwiseAbs().maxCoeff();
        out.max_error = std::max(out.max_error, error);
        out.times.push_back(t);
        out.errors.push_back(error);
        out.extracted.push_back(std::move(extracted));
    }
    out.integrated = trajectory.states;
    return out;
}

}  // namespace affine
