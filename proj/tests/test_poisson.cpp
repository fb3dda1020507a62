#include "affine/errors.hpp"
#include "affine/poisson.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace affine;
using affine::testing::Draw;

namespace {

LinearObservable random_linear(Draw& draw, int n) {
    LinearObservable f{Vector(2 * n + 2 * SkewMatrix::pair_count(n)), draw.normal()};
    for (double& c : f.coefficients) c = draw.normal();
    return f;
}

double jacobi_residual(const Observable& f, const Observable& g, const Observable& h, const ReducedState& at) {
    // The inner bracket's gradient is taken by central differences.
    auto nested = [&](const Observable& a, const Observable& b, const Observable& c) {
        Observable inner{"inner", [=](const ReducedState& s) { return poisson_bracket(b, c, s); },
                         [=](const ReducedState& s) {
                             const int dim = s.dimension();
                             Vector grad(dim);
                             const Vector x = s.flatten();
                             for (int k = 0; k < dim; ++k) {
                                 const double h = 1e-5;
                                 Vector up = x, down = x;
                                 up(k) += h;
                                 down(k) -= h;
                                 grad(k) = (poisson_bracket(b, c, ReducedState::unflatten(s.n(), up)) -
                                            poisson_bracket(b, c, ReducedState::unflatten(s.n(), down))) /
                                           (2.0 * h);
                             }
                             return grad;
                         }};
        return poisson_bracket(a, inner, at);
    };
    return nested(f, g, h) + nested(g, h, f) + nested(h, f, g);
}

}  // namespace

TEST_CASE("canonical pairs") {
    Draw draw(1);
    const ReducedState s = draw.state(3);
    CHECK(poisson_bracket(observables::q(0), observables::p(0), s) == 1.0);
    CHECK(poisson_bracket(observables::q(0), observables::p(1), s) == 0.0);
    CHECK(poisson_bracket(observables::p(0), observables::q(0), s) == -1.0);
    CHECK(poisson_bracket(observables::q(0), observables::q(2), s) == 0.0);
}

TEST_CASE("coupling brackets with a shared index pair vanish") {
    Draw draw(2);
    for (int n : {2, 3}) {
        const ReducedState s = draw.state(n);
        CHECK(poisson_bracket(observables::M(0, 1), observables::N(0, 1), s) == 0.0);
        CHECK(poisson_bracket(observables::M(0, 1), observables::M(0, 1), s) == 0.0);
    }
}

TEST_CASE("coupling brackets close on the couplings") {
    Draw draw(3);
    const ReducedState s = draw.state(3);
    // {M_ab, M_bc} and {M_ab, N_bc} are linear in one entry of M or N respectively.
    const double mm = poisson_bracket(observables::M(0, 1), observables::M(1, 2), s);
    const double mn = poisson_bracket(observables::M(0, 1), observables::N(1, 2), s);
    CHECK(std::abs(std::abs(mm) - std::abs(s.M(0, 2))) < 1e-14);
    CHECK(std::abs(std::abs(mn) - std::abs(s.N(0, 2))) < 1e-14);
    CHECK(std::abs(poisson_bracket(observables::N(0, 1), observables::N(1, 2), s)) ==
          doctest::Approx(std::abs(s.M(0, 2))));
}

TEST_CASE("gyroscope spins commute across factors") {
    Draw draw(4);
    const ReducedState s = draw.state(3);
    for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
            const auto [a, b] = SkewMatrix::pair_at(3, k);
            const auto [c, d] = SkewMatrix::pair_at(3, l);
            CHECK(poisson_bracket(observables::rho(a, b), observables::tau(c, d), s) == 0.0);
        }
    // Each family closes into itself like so(3).
    const double rr = poisson_bracket(observables::rho(0, 1), observables::rho(1, 2), s);
    CHECK(std::abs(std::abs(rr) - std::abs(s.rho()(0, 2))) < 1e-14);
}

TEST_CASE("spin norms commute with opposite-side quadratics") {
    Draw draw(5);
    const ReducedState s = draw.state(3);
    for (int k = 0; k < 3; ++k) {
        const auto [a, b] = SkewMatrix::pair_at(3, k);
        const Observable tau_sq = observables::product(observables::tau(a, b), observables::tau(a, b));
        const Observable rho_sq = observables::product(observables::rho(a, b), observables::rho(a, b));
        CHECK(std::abs(poisson_bracket(observables::spin_norm(), tau_sq, s)) < 1e-12);
        CHECK(std::abs(poisson_bracket(observables::vorticity_norm(), rho_sq, s)) < 1e-12);
        // Norms are Casimirs of their own factor.
        CHECK(std::abs(poisson_bracket(observables::spin_norm(), observables::rho(a, b), s)) < 1e-12);
        CHECK(std::abs(poisson_bracket(observables::vorticity_norm(), observables::tau(a, b), s)) < 1e-12);
    }
}

TEST_CASE("bracket of linear observables matches the tensor at every state") {
    Draw draw(6);
    for (int n : {2, 3}) {
        for (int trial = 0; trial < 20; ++trial) {
            const LinearObservable f = random_linear(draw, n);
            const LinearObservable g = random_linear(draw, n);
            const LinearObservable fg = poisson_bracket(f, g, n);
            const ReducedState s = draw.state(n);
            const double direct = poisson_bracket(observables::linear(f), observables::linear(g), s);
            CHECK(fg(s) == doctest::Approx(direct).epsilon(1e-12));
        }
    }
}

TEST_CASE("Jacobi identity on linear observables") {
    Draw draw(7);
    for (int trial = 0; trial < 200; ++trial) {
        const LinearObservable f = random_linear(draw, 3);
        const LinearObservable g = random_linear(draw, 3);
        const LinearObservable h = random_linear(draw, 3);
        const LinearObservable a = poisson_bracket(f, poisson_bracket(g, h, 3), 3);
        const LinearObservable b = poisson_bracket(g, poisson_bracket(h, f, 3), 3);
        const LinearObservable c = poisson_bracket(h, poisson_bracket(f, g, 3), 3);
        const double residual = (a.coefficients + b.coefficients + c.coefficients).cwiseAbs().maxCoeff() +
                                std::abs(a.constant + b.constant + c.constant);
        CHECK(residual < 1e-10);
    }
}

TEST_CASE("Jacobi identity on nonlinear observables") {
    Draw draw(8);
    const ReducedState s = draw.state(3);
    const Observable f = observables::product(observables::M(0, 1), observables::q(2));
    const Observable g = observables::product(observables::N(1, 2), observables::p(0));
    const Observable h = observables::sum(observables::rho(0, 2), observables::scaled(0.5, observables::casimir()));
    CHECK(std::abs(jacobi_residual(f, g, h, s)) < 1e-6);
}

TEST_CASE("antisymmetry and Leibniz rule") {
    Draw draw(9);
    const ReducedState s = draw.state(3);
    const Observable f = observables::M(0, 2);
    const Observable g = observables::product(observables::N(0, 1), observables::p(1));
    const Observable h = observables::tau(1, 2);
    CHECK(poisson_bracket(f, g, s) == doctest::Approx(-poisson_bracket(g, f, s)).epsilon(1e-14));
    const double lhs = poisson_bracket(f, observables::product(g, h), s);
    const double rhs = poisson_bracket(f, g, s) * h.value(s) + g.value(s) * poisson_bracket(f, h, s);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("Casimir commutes with shape-preserving observables") {
    Draw draw(10);
    const ReducedState s = draw.state(3);
    ModelSpec model;
    model.B = 0.3;
    const Observable energy = observables::hamiltonian(model, PotentialSpec{});
    CHECK(std::abs(poisson_bracket(observables::casimir(), energy, s)) < 1e-10);
}

TEST_CASE("Poisson tensor is antisymmetric") {
    Draw draw(11);
    const Matrix pi = poisson_tensor(draw.state(3));
    CHECK((pi + pi.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("out-of-range observables") {
    const ReducedState s(2);
    CHECK_THROWS_AS(observables::q(-1).value(s), UnknownObservable);
    CHECK_THROWS_AS(observables::M(1, 1).value(s), UnknownObservable);
    CHECK_THROWS_AS(poisson_bracket(observables::M(0, 2), observables::q(0), s), UnknownObservable);
}

TEST_CASE("bracket harness") {
    const BracketReport one = check_brackets(17, 1);
    CHECK(one.max_residual() < 1e-12);
    const BracketReport first = check_brackets(5, 50);
    const BracketReport second = check_brackets(5, 50);
    CHECK(first.passed());
    CHECK(first.antisymmetry == second.antisymmetry);
    CHECK(first.jacobi == second.jacobi);
    CHECK(first.leibniz == second.leibniz);
    CHECK(first.spin_cross == 0.0);
}
