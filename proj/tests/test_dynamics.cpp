#include "affine/dynamics.hpp"
#include "affine/poisson.hpp"
#include "affine/errors.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace affine;
using affine::testing::Draw;
using affine::testing::max_abs;

namespace {

ModelSpec affaff(double A = 1.0, double B = 0.3) {
    ModelSpec m;
    m.A = A;
    m.B = B;
    return m;
}

double max_state_gap(const ReducedState& a, const ReducedState& b) {
    return (a.flatten() - b.flatten()).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("equilibrium of the free affine-affine model") {
    ReducedState s(3);
    s.q = Vector{{0.8, 0.1, -0.9}};
    const ReducedState rhs = eom_rhs(affaff(), PotentialSpec{}, s);
    CHECK(rhs.flatten().isZero());
}

TEST_CASE("free dilatation-shear motion without couplings") {
    // dq/dt = p / alpha + (sum p / beta) (1, ..., 1).
    const ModelSpec model = affaff(0.8, 0.35);
    ReducedState s(3);
    s.q = Vector{{0.7, 0.0, -0.6}};
    s.p = Vector{{0.4, -0.1, 0.9}};
    const ReducedState rhs = eom_rhs(model, PotentialSpec{}, s);
    const Vector expected = s.p / model.alpha() + Vector::Constant(3, s.p.sum() / model.beta(3));
    CHECK(max_abs(rhs.q - expected) < 1e-14);
    CHECK(rhs.p.isZero());
    CHECK(rhs.M.norm_squared() == 0.0);
    CHECK(rhs.N.norm_squared() == 0.0);
}

TEST_CASE("equations of motion are the bracket with the Hamiltonian") {
    Draw draw(3);
    ModelSpec model;
    model.kind = ModelKind::AffMetr;
    model.I = 1.4;
    model.A = 0.5;
    model.B = 0.2;
    PotentialSpec potential;
    potential.kind = DilatationalKind::HarmonicWell;
    potential.k = 1.0;
    const Observable energy = observables::hamiltonian(model, potential);
    for (int trial = 0; trial < 5; ++trial) {
        const ReducedState s = draw.state(3);
        const Vector rhs = eom_rhs(model, potential, s).flatten();
        for (int k = 0; k < s.dimension(); ++k) {
            Vector unit = Vector::Zero(s.dimension());
            unit(k) = 1.0;
            const double expected = poisson_bracket(observables::linear({unit, 0.0}), energy, s);
            CHECK(rhs(k) == doctest::Approx(expected).epsilon(1e-12).scale(1.0));
        }
    }
}

TEST_CASE("rest state gives a constant trajectory") {
    ReducedState s(2);
    s.q = Vector{{0.3, -0.3}};
    const Trajectory t = integrate(affaff(), PotentialSpec{}, s, 1.0, {.step = 0.01});
    CHECK(t.size() == 101);
    for (const ReducedState& x : t.states) CHECK(x.flatten() == s.flatten());
    CHECK(t.energy_drift() == 0.0);
    CHECK(t.conforming);

    const Trajectory with_attitudes =
        reconstruct_attitudes(affaff(), PotentialSpec{}, t, Matrix::Identity(2, 2), Matrix::Identity(2, 2));
    for (const Attitude& a : with_attitudes.attitudes) {
        CHECK(max_abs(a.L - Matrix::Identity(2, 2)) == 0.0);
        CHECK(max_abs(a.R - Matrix::Identity(2, 2)) == 0.0);
    }
}

TEST_CASE("fixed-step integrator is fourth order") {
    Draw draw(4);
    const ModelSpec model = affaff(1.0, 0.2);
    PotentialSpec potential;
    potential.kind = DilatationalKind::HarmonicWell;
    potential.k = 1.0;
    const ReducedState s = draw.state(3);
    const ReducedState reference = integrate(model, potential, s, 1.0, {.step = 1e-4}).states.back();
    const double coarse = max_state_gap(integrate(model, potential, s, 1.0, {.step = 0.04}).states.back(), reference);
    const double fine = max_state_gap(integrate(model, potential, s, 1.0, {.step = 0.02}).states.back(), reference);
    const double ratio = coarse / fine;
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
}

TEST_CASE("adaptive integrator meets its tolerance") {
    Draw draw(5);
    const ModelSpec model = affaff(1.0, 0.2);
    const ReducedState s = draw.state(3);
    const ReducedState reference = integrate(model, PotentialSpec{}, s, 2.0, {.step = 1e-4}).states.back();
    const Trajectory adaptive =
        integrate(model, PotentialSpec{}, s, 2.0, {.step = 0.1, .adaptive = true, .relative_tolerance = 1e-10});
    CHECK(adaptive.times.back() == doctest::Approx(2.0));
    CHECK(max_state_gap(adaptive.states.back(), reference) < 1e-7);
}

TEST_CASE("sampling keeps every k-th step and the endpoint") {
    ReducedState s(2);
    s.q = Vector{{0.5, -0.5}};
    s.p = Vector{{0.1, 0.0}};
    const Trajectory t = integrate(affaff(), PotentialSpec{}, s, 1.05, {.step = 0.1, .sample_every = 4});
    REQUIRE(t.size() == 4);
    CHECK(t.times[1] == doctest::Approx(0.4));
    CHECK(t.times[2] == doctest::Approx(0.8));
    CHECK(t.times[3] == 1.05);
}

TEST_CASE("invalid integration requests") {
    const ReducedState s(2);
    CHECK_THROWS_AS(integrate(affaff(), PotentialSpec{}, s, 0.0), DomainError);
    CHECK_THROWS_AS(integrate(affaff(), PotentialSpec{}, s, 1.0, {.step = -1.0}), DomainError);
    ModelSpec bad = affaff();
    bad.A = 0.0;
    CHECK_THROWS_AS(integrate(bad, PotentialSpec{}, s, 1.0), DomainError);
}

TEST_CASE("energy and Casimir conservation across model kinds") {
    Draw draw(6);
    PotentialSpec well;
    well.kind = DilatationalKind::HarmonicWell;
    well.k = 1.0;
    std::vector<std::pair<ModelSpec, PotentialSpec>> cases;
    ModelSpec dalembert;
    dalembert.kind = ModelKind::DAlembert;
    dalembert.I = 1.0;
    cases.emplace_back(dalembert, well);
    cases.emplace_back(affaff(), PotentialSpec{});
    for (ModelKind kind : {ModelKind::AffMetr, ModelKind::MetrAff}) {
        ModelSpec m;
        m.kind = kind;
        m.I = 1.5;
        m.A = 0.5;
        m.B = 0.2;
        cases.emplace_back(m, PotentialSpec{});
    }
    for (const auto& [model, potential] : cases) {
        const ReducedState s = draw.state(3, 0.3);
        const Trajectory t = integrate(model, potential, s, 2.0, {.step = 1e-3});
        CHECK(t.energy_drift() < 1e-8);
        if (model.kind != ModelKind::DAlembert) CHECK(t.casimir_drift() < 1e-8);
        // Both spin norms commute with any Hamiltonian whose potential depends on q only.
        const double rho0 = s.rho().norm_squared();
        const double tau0 = s.tau().norm_squared();
        CHECK(t.states.back().rho().norm_squared() == doctest::Approx(rho0).epsilon(1e-8));
        CHECK(t.states.back().tau().norm_squared() == doctest::Approx(tau0).epsilon(1e-8));
    }
}

TEST_CASE("planar couplings are constants of motion") {
    Draw draw(7);
    for (ModelKind kind : {ModelKind::AffAff, ModelKind::AffMetr, ModelKind::MetrAff}) {
        ModelSpec model;
        model.kind = kind;
        model.I = 1.5;
        model.A = 0.5;
        model.B = 0.2;
        const ReducedState s = draw.state(2);
        const Trajectory t = integrate(model, PotentialSpec{}, s, 2.0, {.step = 1e-3, .sample_every = 100});
        for (const ReducedState& x : t.states) {
            CHECK(std::abs(x.M(0, 1) - s.M(0, 1)) < 1e-10);
            CHECK(std::abs(x.N(0, 1) - s.N(0, 1)) < 1e-10);
        }
    }
}

TEST_CASE("parameter sweep matches the serial reference exactly") {
    Draw draw(8);
    std::vector<ReducedState> states;
    for (int k = 0; k < 6; ++k) states.push_back(draw.state(3));
    const ModelSpec model = affaff();
    const auto parallel = integrate_sweep(model, PotentialSpec{}, states, 0.5, {.step = 1e-2});
    const auto serial = integrate_sweep_serial(model, PotentialSpec{}, states, 0.5, {.step = 1e-2});
    REQUIRE(parallel.size() == serial.size());
    for (std::size_t k = 0; k < serial.size(); ++k) {
        CHECK(parallel[k].times == serial[k].times);
        CHECK(parallel[k].energy == serial[k].energy);
        CHECK(parallel[k].states.back().flatten() == serial[k].states.back().flatten());
    }
}

TEST_CASE("sweep surfaces the first failure") {
    std::vector<ReducedState> states(2, ReducedState(2));
    states[1].q = Vector{{0.1, 0.1}};
    states[1].M.set(0, 1, 1.0);
    CHECK_THROWS_AS(integrate_sweep(affaff(), PotentialSpec{}, states, 0.1), DegenerateInertia);
}

TEST_CASE("relative equilibrium with matched couplings turns only the left factor") {
    // At tanh^2(x/2) = m/n with m, n of one sign, x is stationary and the
    // right-factor velocity vanishes: the motion is a steady rotation of L.
    const double m = 1.0;
    const double n = 2.0;
    const double x = planar_potential_minimum(m, n, 1.0);
    ReducedState s(2);
    s.q = Vector{{0.5 * x, -0.5 * x}};
    s.M.set(0, 1, m);
    s.N.set(0, 1, n);
    const ModelSpec model = affaff(1.0, 0.0);
    const PolarVelocity v = inverse_legendre(model, s);
    CHECK(std::abs(v.theta(0, 1)) < 1e-14);
    CHECK(std::abs(v.chi(0, 1)) > 0.1);

    const Matrix R0 = affine::testing::rotation2(0.3);
    const Trajectory t = reconstruct_attitudes(model, PotentialSpec{},
                                               integrate(model, PotentialSpec{}, s, 2.0, {.step = 1e-2}),
                                               Matrix::Identity(2, 2), R0);
    for (const Attitude& a : t.attitudes) CHECK(max_abs(a.R - R0) < 1e-12);
    const Matrix expected_L = affine::testing::rotation2(-v.chi(0, 1) * 2.0);
    CHECK(max_abs(t.attitudes.back().L - expected_L) < 1e-9);
}

TEST_CASE("spatial velocity recovers phi_dot phi^-1") {
    Draw draw(9);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix phi = draw.configuration(3);
        const Matrix phi_dot = draw.gaussian(3, 3);
        const PolarMotion motion = polar_motion(phi, phi_dot);
        const Matrix omega = spatial_velocity({motion.polar.L, motion.polar.R}, motion.polar.q, motion.velocity);
        CHECK(max_abs(omega - phi_dot * phi.inverse()) < 1e-9 * std::max(1.0, max_abs(omega)));
    }
}

TEST_CASE("matrix exponential") {
    Draw draw(10);
    CHECK(max_abs(expm(Matrix::Zero(3, 3)) - Matrix::Identity(3, 3)) < 1e-15);
    const Matrix small = 1e-3 * draw.gaussian(3, 3);
    const Matrix series = Matrix::Identity(3, 3) + small + small * small / 2.0 + small * small * small / 6.0 +
                         small * small * small * small / 24.0;
    CHECK(max_abs(expm(small) - series) < 1e-13);
    const Matrix big = 4.0 * draw.gaussian(3, 3);
    CHECK(max_abs(expm(big) * expm(-big) - Matrix::Identity(3, 3)) < 1e-9);
    CHECK(expm(big).determinant() == doctest::Approx(std::exp(big.trace())).epsilon(1e-10));
}

TEST_CASE("geodesic exponentials") {
    Draw draw(11);
    const Matrix phi0 = draw.configuration(3);
    CHECK(max_abs(geodesic_exponential(phi0, Matrix::Zero(3, 3), 2.5) - phi0) < 1e-15);
    const double w = 0.7;
    const Matrix omega{{0.0, -w}, {w, 0.0}};
    for (double t : {0.5, 1.0, 4.0})
        CHECK(max_abs(geodesic_exponential(Matrix::Identity(2, 2), omega, t) - affine::testing::rotation2(w * t)) <
              1e-14);
}

TEST_CASE("geodesic dual route") {
    Draw draw(12);
    const ModelSpec model = affaff(1.0, 0.25);
    for (int trial = 0; trial < 3; ++trial) {
        const Matrix phi0 = draw.separated_configuration(3);
        const Matrix omega = 0.5 * draw.gaussian(3, 3);
        const DualRouteReport r = geodesic_dual_route(model, phi0, omega, 1.0, {.step = 1e-3, .sample_every = 50});
        CHECK(r.max_error < 1e-6);
        CHECK(r.times.size() == r.errors.size());
    }
    CHECK_THROWS_AS(geodesic_dual_route(model, draw.configuration(3), draw.gaussian(2, 2), 1.0), ShapeMismatch);
    ModelSpec other = model;
    other.kind = ModelKind::MetrAff;
    other.I = 2.0;
    CHECK_THROWS_AS(geodesic_dual_route(other, draw.configuration(2), draw.gaussian(2, 2), 1.0), DomainError);
}

TEST_CASE("stationarity of normal generators") {
    Draw draw(13);
    const Matrix skew = draw.skew(3);
    const Matrix g = draw.gaussian(3, 3);
    CHECK(stationary_check(skew, ModelKind::AffAff).stationary);
    CHECK(stationary_check(g + g.transpose(), ModelKind::AffAff).stationary);
    const StationaryVerdict shear = stationary_check(Matrix{{0.0, 1.0}, {0.0, 0.0}}, ModelKind::AffAff);
    CHECK_FALSE(shear.stationary);
    CHECK(shear.residual == doctest::Approx(std::sqrt(2.0)));
}
