#include "affine/poisson.hpp"

#include "affine/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace affine {

namespace {

struct Term {
    int index;
    double coefficient;
};

struct BasisBracket {
    double constant = 0.0;
    std::vector<Term> linear;
};

struct Layout {
    int n;
    int pairs;
    int q(int a) const { return a; }
    int p(int a) const { return n + a; }
    int M(int k) const { return 2 * n + k; }
    int N(int k) const { return 2 * n + pairs + k; }
    int size() const { return 2 * n + 2 * pairs; }
};

enum class Block { q, p, M, N };

std::pair<Block, int> classify(const Layout& lay, int i) {
    if (i < lay.n) return {Block::q, i};
    if (i < 2 * lay.n) return {Block::p, i - lay.n};
    if (i < 2 * lay.n + lay.pairs) return {Block::M, i - 2 * lay.n};
    return {Block::N, i - 2 * lay.n - lay.pairs};
}

// Adds `sign * X_xy` to `out`, X being the M block (target = M) or the N block.
void add_entry(const Layout& lay, Block target, int x, int y, double sign, std::vector<Term>& out) {
    if (x == y) return;
    const bool upper = x < y;
    const int k = SkewMatrix::pair_index(lay.n, upper ? x : y, upper ? y : x);
    const int index = target == Block::M ? lay.M(k) : lay.N(k);
    out.push_back({index, upper ? sign : -sign});
}

// X_cb d_ad - X_ad d_bc + X_ac d_db - X_db d_ac
void shifted_deltas(const Layout& lay, Block target, int a, int b, int c, int d, std::vector<Term>& out) {
    if (a == d) add_entry(lay, target, c, b, 1.0, out);
    if (b == c) add_entry(lay, target, a, d, -1.0, out);
    if (d == b) add_entry(lay, target, a, c, 1.0, out);
    if (a == c) add_entry(lay, target, d, b, -1.0, out);
}

BasisBracket basis_bracket(const Layout& lay, int i, int j) {
    BasisBracket out;
    const auto [bi, ii] = classify(lay, i);
    const auto [bj, jj] = classify(lay, j);
    if (bi == Block::q && bj == Block::p) {
        out.constant = ii == jj ? 1.0 : 0.0;
    } else if (bi == Block::p && bj == Block::q) {
        out.constant = ii == jj ? -1.0 : 0.0;
    } else if ((bi == Block::M || bi == Block::N) && (bj == Block::M || bj == Block::N)) {
        const auto [a, b] = SkewMatrix::pair_at(lay.n, ii);
        const auto [c, d] = SkewMatrix::pair_at(lay.n, jj);
        // {M,M} and {N,N} close on M; the mixed brackets close on N.
        const Block target = bi == bj ? Block::M : Block::N;
        shifted_deltas(lay, target, a, b, c, d, out.linear);
    }
    return out;
}

int require_pair(int n, int a, int b) {
    if (a < 0 || b < 0 || a >= n || b >= n || a == b)
        throw UnknownObservable("no coupling component (" + std::to_string(a + 1) + "," + std::to_string(b + 1) +
                                ") for n = " + std::to_string(n));
    return SkewMatrix::pair_index(n, std::min(a, b), std::max(a, b));
}

int require_index(int n, int a) {
    if (a < 0 || a >= n) throw UnknownObservable("no invariant index " + std::to_string(a + 1));
    return a;
}

std::string pair_tag(const char* name, int a, int b) {
    return std::string(name) + std::to_string(a + 1) + std::to_string(b + 1);
}

// Gradient of c_M * X_ab(M) + c_N * X_ab(N) with the sign of the (a, b) orientation.
Observable coupling(std::string tag, int a, int b, double cM, double cN) {
    const double orient = a < b ? 1.0 : -1.0;
    Observable o;
    o.tag = std::move(tag);
    o.value = [=](const ReducedState& s) {
        require_pair(s.n(), a, b);
        return cM * s.M(a, b) + cN * s.N(a, b);
    };
    o.gradient = [=](const ReducedState& s) {
        const Layout lay{s.n(), SkewMatrix::pair_count(s.n())};
        const int k = require_pair(s.n(), a, b);
        Vector g = Vector::Zero(lay.size());
        g(lay.M(k)) = orient * cM;
        g(lay.N(k)) = orient * cN;
        return g;
    };
    return o;
}

}  // namespace

namespace observables {

Observable q(int a) {
    return {"q" + std::to_string(a + 1),
            [a](const ReducedState& s) { return s.q(require_index(s.n(), a)); },
            [a](const ReducedState& s) {
                Vector g = Vector::Zero(s.dimension());
                g(require_index(s.n(), a)) = 1.0;
                return g;
            }};
}

Observable p(int a) {
    return {"p" + std::to_string(a + 1),
            [a](const ReducedState& s) { return s.p(require_index(s.n(), a)); },
            [a](const ReducedState& s) {
                Vector g = Vector::Zero(s.dimension());
                g(s.n() + require_index(s.n(), a)) = 1.0;
                return g;
            }};
}

Observable M(int a, int b) { return coupling(pair_tag("M", a, b), a, b, 1.0, 0.0); }
Observable N(int a, int b) { return coupling(pair_tag("N", a, b), a, b, 0.0, 1.0); }
Observable rho(int a, int b) { return coupling(pair_tag("rho", a, b), a, b, -0.5, 0.5); }
Observable tau(int a, int b) { return coupling(pair_tag("tau", a, b), a, b, -0.5, -0.5); }

Observable hamiltonian(const ModelSpec& model, const PotentialSpec& potential) {
    return {"H",
            [=](const ReducedState& s) { return affine::hamiltonian(model, potential, s); },
            [=](const ReducedState& s) { return hamiltonian_gradient(model, potential, s).flatten(); }};
}

Observable casimir() {
    // C = T_AffAff(A = 1/2, B = 0) - pbar^2 / n.
    ModelSpec half;
    half.kind = ModelKind::AffAff;
    half.A = 0.5;
    half.B = 0.0;
    return {"C2",
            [](const ReducedState& s) { return casimir_csl2(s); },
            [half](const ReducedState& s) {
                Vector g = hamiltonian_gradient(half, PotentialSpec{}, s).flatten();
                const double total = s.p.sum();
                g.segment(s.n(), s.n()).array() -= 2.0 * total / s.n();
                return g;
            }};
}

Observable spin_norm() {
    return {"|rho|^2",
            [](const ReducedState& s) { return s.rho().norm_squared(); },
            [](const ReducedState& s) {
                const Layout lay{s.n(), SkewMatrix::pair_count(s.n())};
                const SkewMatrix r = s.rho();
                Vector g = Vector::Zero(lay.size());
                for (int k = 0; k < lay.pairs; ++k) {
                    g(lay.M(k)) = -r.upper()[static_cast<std::size_t>(k)];
                    g(lay.N(k)) = r.upper()[static_cast<std::size_t>(k)];
                }
                return g;
            }};
}

Observable vorticity_norm() {
    return {"|tau|^2",
            [](const ReducedState& s) { return s.tau().norm_squared(); },
            [](const ReducedState& s) {
                const Layout lay{s.n(), SkewMatrix::pair_count(s.n())};
                const SkewMatrix t = s.tau();
                Vector g = Vector::Zero(lay.size());
                for (int k = 0; k < lay.pairs; ++k) {
                    g(lay.M(k)) = -t.upper()[static_cast<std::size_t>(k)];
                    g(lay.N(k)) = -t.upper()[static_cast<std::size_t>(k)];
                }
                return g;
            }};
}

Observable linear(const LinearObservable& f) {
    return {"linear",
            [f](const ReducedState& s) {
                if (f.coefficients.size() != s.dimension()) throw UnknownObservable("linear observable dimension");
                return f(s);
            },
            [f](const ReducedState& s) {
                if (f.coefficients.size() != s.dimension()) throw UnknownObservable("linear observable dimension");
                return Vector(f.coefficients);
            }};
}

Observable sum(const Observable& f, const Observable& g) {
    return {"(" + f.tag + "+" + g.tag + ")",
            [f, g](const ReducedState& s) { return f.value(s) + g.value(s); },
            [f, g](const ReducedState& s) { return Vector(f.gradient(s) + g.gradient(s)); }};
}

Observable scaled(double c, const Observable& f) {
    return {std::to_string(c) + "*" + f.tag,
            [c, f](const ReducedState& s) { return c * f.value(s); },
            [c, f](const ReducedState& s) { return Vector(c * f.gradient(s)); }};
}

Observable product(const Observable& f, const Observable& g) {
    return {"(" + f.tag + "*" + g.tag + ")",
            [f, g](const ReducedState& s) { return f.value(s) * g.value(s); },
            [f, g](const ReducedState& s) { return Vector(f.value(s) * g.gradient(s) + g.value(s) * f.gradient(s)); }};
}

}  // namespace observables

Matrix poisson_tensor(const ReducedState& state) {
    const Layout lay{state.n(), SkewMatrix::pair_count(state.n())};
    const Vector x = state.flatten();
    Matrix pi = Matrix::Zero(lay.size(), lay.size());
    for (int i = 0; i < lay.size(); ++i)
        for (int j = 0; j < lay.size(); ++j) {
            const BasisBracket b = basis_bracket(lay, i, j);
            double v = b.constant;
            for (const Term& t : b.linear) v += t.coefficient * x(t.index);
            pi(i, j) = v;
        }
    return pi;
}

double poisson_bracket(const Vector& grad_f, const Vector& grad_g, const ReducedState& at) {
    if (grad_f.size() != at.dimension() || grad_g.size() != at.dimension())
        throw UnknownObservable("gradient dimension does not match the state");
    return grad_f.dot(poisson_tensor(at) * grad_g);
}

double poisson_bracket(const Observable& f, const Observable& g, const ReducedState& at) {
    return poisson_bracket(f.gradient(at), g.gradient(at), at);
}

LinearObservable poisson_bracket(const LinearObservable& f, const LinearObservable& g, int n) {
    const Layout lay{n, SkewMatrix::pair_count(n)};
    if (f.coefficients.size() != lay.size() || g.coefficients.size() != lay.size())
        throw UnknownObservable("linear observable dimension");
    LinearObservable out{Vector::Zero(lay.size()), 0.0};
    for (int i = 0; i < lay.size(); ++i) {
        if (f.coefficients(i) == 0.0) continue;
        for (int j = 0; j < lay.size(); ++j) {
            const double w = f.coefficients(i) * g.coefficients(j);
            if (w == 0.0) continue;
            const BasisBracket b = basis_bracket(lay, i, j);
            out.constant += w * b.constant;
            for (const Term& t : b.linear) out.coefficients(t.index) += w * t.coefficient;
        }
    }
    return out;
}

double BracketReport::max_residual() const { return std::max({antisymmetry, jacobi, leibniz, spin_cross}); }

BracketReport check_brackets(std::uint64_t seed, int trials) {
    constexpr int n = 3;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    auto random_state = [&] {
        ReducedState s(n);
        for (int a = 0; a < n; ++a) {
            s.q(a) = 0.8 * (n - 1 - a) + 0.3 * unit(rng);
            s.p(a) = unit(rng);
        }
        for (auto& v : s.M.upper()) v = unit(rng);
        for (auto& v : s.N.upper()) v = unit(rng);
        return s;
    };
    auto random_linear = [&](int dim) {
        LinearObservable f{Vector(dim), unit(rng)};
        for (int i = 0; i < dim; ++i) f.coefficients(i) = unit(rng);
        return f;
    };

    ModelSpec model;
    model.kind = ModelKind::AffMetr;
    model.I = 1.3;
    model.A = 0.4;
    model.B = 0.2;
    const std::vector<Observable> nonlinear{observables::hamiltonian(model, PotentialSpec{}), observables::casimir(),
                                            observables::spin_norm(), observables::vorticity_norm()};

    BracketReport report;
    report.trials = trials;
    report.seed = seed;
    for (int t = 0; t < trials; ++t) {
        const ReducedState s = random_state();
        const int dim = s.dimension();
        const LinearObservable f = random_linear(dim);
        const LinearObservable g = random_linear(dim);
        const LinearObservable h = random_linear(dim);

        const double jac = poisson_bracket(poisson_bracket(f, g, n), h, n)(s) +
                           poisson_bracket(poisson_bracket(g, h, n), f, n)(s) +
                           poisson_bracket(poisson_bracket(h, f, n), g, n)(s);
        report.jacobi = std::max(report.jacobi, std::abs(jac));

        const Observable F = observables::linear(f);
        const Observable G = nonlinear[static_cast<std::size_t>(t) % nonlinear.size()];
        const Observable H = observables::product(observables::linear(h), observables::linear(g));
        const double fg = poisson_bracket(F, G, s);
        const double gf = poisson_bracket(G, F, s);
        report.antisymmetry = std::max(report.antisymmetry, std::abs(fg + gf) / std::max(1.0, std::abs(fg)));

        const double lhs = poisson_bracket(observables::product(F, G), H, s);
        const double rhs = F.value(s) * poisson_bracket(G, H, s) + G.value(s) * poisson_bracket(F, H, s);
        report.leibniz = std::max(report.leibniz, std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)}));

        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    for (int d = c + 1; d < n; ++d)
                        report.spin_cross = std::max(
                            report.spin_cross, std::abs(poisson_bracket(observables::rho(a, b), observables::tau(c, d), s)));
    }
    return report;
}

}  // namespace affine
