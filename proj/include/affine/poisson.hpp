#pragma once

#include "affine/phase.hpp"

#include <cstdint>
#include <functional>
#include <string>

namespace affine {

// Smooth function of the reduced state. Gradients are taken in the flat
// coordinate order of ReducedState::flatten.
struct Observable {
    std::string tag;
    std::function<double(const ReducedState&)> value;
    std::function<Vector(const ReducedState&)> gradient;
};

// Affine-linear observable c . x + c0, closed under the bracket.
struct LinearObservable {
    Vector coefficients;
    double constant = 0.0;

    double operator()(const ReducedState& s) const { return coefficients.dot(s.flatten()) + constant; }
};

namespace observables {

Observable q(int a);
Observable p(int a);
Observable M(int a, int b);
Observable N(int a, int b);
Observable rho(int a, int b);
Observable tau(int a, int b);
Observable hamiltonian(const ModelSpec& model, const PotentialSpec& potential);
Observable casimir();
Observable spin_norm();       // ||rho||^2
Observable vorticity_norm();  // ||tau||^2
Observable linear(const LinearObservable& f);
Observable sum(const Observable& f, const Observable& g);
Observable scaled(double c, const Observable& f);
Observable product(const Observable& f, const Observable& g);

}  // namespace observables

// Pi(x) with {F, G} = grad F . Pi(x) grad G.
Matrix poisson_tensor(const ReducedState& state);

double poisson_bracket(const Observable& f, const Observable& g, const ReducedState& at);
double poisson_bracket(const Vector& grad_f, const Vector& grad_g, const ReducedState& at);

// Exact bracket of two linear observables via the structure constants.
LinearObservable poisson_bracket(const LinearObservable& f, const LinearObservable& g, int n);

struct BracketReport {
    int trials = 0;
    std::uint64_t seed = 0;
    double antisymmetry = 0.0;
    double jacobi = 0.0;
    double leibniz = 0.0;
    double spin_cross = 0.0;  // max |{rho_ab, tau_cd}|
    double max_residual() const;
    bool passed() const { return max_residual() < 1e-9; }
};

// Antisymmetry, Jacobi and Leibniz residuals over random observables at random states (n = 3).
BracketReport check_brackets(std::uint64_t seed, int trials);

}  // namespace affine
