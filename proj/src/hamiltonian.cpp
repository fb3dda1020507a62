#include "affine/errors.hpp"
#include "affine/phase.hpp"

#include <cmath>
#include <numbers>

namespace affine {

namespace {

constexpr double kCoincidence = 1e-9;

// One pair interaction c^2 * f(d) with d = q_a - q_b; value and df/dd.
struct PairShape {
    double f = 0.0;
    double df = 0.0;
};

[[noreturn]] void degenerate(int a, int b) {
    throw DegenerateInertia("coincident invariants q" + std::to_string(a + 1) + " = q" + std::to_string(b + 1) +
                            " with nonzero coupling");
}

PairShape shear_shape(ModelKind kind, double inertia, double d, double Qa, double Qb) {
    switch (kind) {
        case ModelKind::DAlembert: {
            const double gap = Qa - Qb;
            return {1.0 / (4.0 * inertia * gap * gap), 0.0};
        }
        case ModelKind::TrigUn: {
            const double s = std::sin(0.5 * d);
            const double c = std::cos(0.5 * d);
            return {1.0 / (16.0 * inertia * s * s), -c / (16.0 * inertia * s * s * s)};
        }
        default: {
            const double s = std::sinh(0.5 * d);
            const double c = std::cosh(0.5 * d);
            return {1.0 / (16.0 * inertia * s * s), -c / (16.0 * inertia * s * s * s)};
        }
    }
}

PairShape dilation_shape(ModelKind kind, double inertia, double d, double Qa, double Qb) {
    switch (kind) {
        case ModelKind::DAlembert: {
            const double sum = Qa + Qb;
            return {1.0 / (4.0 * inertia * sum * sum), 0.0};
        }
        case ModelKind::TrigUn: {
            const double s = std::sin(0.5 * d);
            const double c = std::cos(0.5 * d);
            return {1.0 / (16.0 * inertia * c * c), s / (16.0 * inertia * c * c * c)};
        }
        default: {
            const double s = std::sinh(0.5 * d);
            const double c = std::cosh(0.5 * d);
            return {-1.0 / (16.0 * inertia * c * c), s / (16.0 * inertia * c * c * c)};
        }
    }
}

bool shear_singular(ModelKind kind, double d) {
    return std::abs(kind == ModelKind::TrigUn ? wrap_angle(d) : d) < kCoincidence;
}

bool dilation_singular(ModelKind kind, double d) {
    return kind == ModelKind::TrigUn && std::abs(wrap_angle(d - std::numbers::pi)) < kCoincidence;
}

void require_trig_domain(const ModelSpec& model, const PotentialSpec& potential, const ReducedState& s) {
    if (model.kind != ModelKind::TrigUn) return;
    if (!potential.is_zero()) throw DomainError("TrigUn supports the free (potential-less) model only");
    for (Eigen::Index a = 0; a < s.q.size(); ++a)
        if (!(s.q(a) > -std::numbers::pi && s.q(a) <= std::numbers::pi))
            throw DomainError("TrigUn invariants must lie in (-pi, pi]");
}

// Everything except the potential; the gradient is accumulated when `grad` is set.
double kinetic_impl(const ModelSpec& model, const ReducedState& s, StateGradient* grad) {
    const int n = s.n();
    const ModelKind kind = model.kind;
    const double inertia = model.shear_inertia();
    double energy = 0.0;

    if (grad) {
        grad->dq = Vector::Zero(n);
        grad->dp = Vector::Zero(n);
        grad->dM = SkewMatrix(n);
        grad->dN = SkewMatrix(n);
    }

    const Vector Q = s.q.array().exp().matrix();
    if (kind == ModelKind::DAlembert) {
        for (int a = 0; a < n; ++a) {
            const double w = std::exp(-2.0 * s.q(a)) / model.I;
            energy += 0.5 * s.p(a) * s.p(a) * w;
            if (grad) {
                grad->dp(a) += s.p(a) * w;
                grad->dq(a) -= s.p(a) * s.p(a) * w;
            }
        }
    } else {
        const double total = s.p.sum();
        const double mass = model.dilatation_inertia(n);
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) {
                const double diff = s.p(a) - s.p(b);
                energy += diff * diff / (2.0 * n * inertia);
            }
        energy += total * total / (2.0 * mass);
        if (grad)
            for (int a = 0; a < n; ++a)
                grad->dp(a) += (n * s.p(a) - total) / (n * inertia) + total / mass;
    }

    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            const double d = s.q(a) - s.q(b);
            const double m = s.M(a, b);
            const double nc = s.N(a, b);
            if (m != 0.0) {
                if (shear_singular(kind, d)) degenerate(a, b);
                const PairShape g = shear_shape(kind, inertia, d, Q(a), Q(b));
                energy += m * m * g.f;
                if (grad) {
                    grad->dM.set(a, b, grad->dM(a, b) + 2.0 * m * g.f);
                    if (kind == ModelKind::DAlembert) {
                        const double gap = Q(a) - Q(b);
                        const double dg = -2.0 * m * m / (4.0 * inertia * gap * gap * gap);
                        grad->dq(a) += dg * Q(a);
                        grad->dq(b) -= dg * Q(b);
                    } else {
                        grad->dq(a) += m * m * g.df;
                        grad->dq(b) -= m * m * g.df;
                    }
                }
            }
            if (nc != 0.0) {
                if (dilation_singular(kind, d)) degenerate(a, b);
                const PairShape g = dilation_shape(kind, inertia, d, Q(a), Q(b));
                energy += nc * nc * g.f;
                if (grad) {
                    grad->dN.set(a, b, grad->dN(a, b) + 2.0 * nc * g.f);
                    if (kind == ModelKind::DAlembert) {
                        const double sum = Q(a) + Q(b);
                        const double dg = -2.0 * nc * nc / (4.0 * inertia * sum * sum * sum);
                        grad->dq(a) += dg * Q(a);
                        grad->dq(b) += dg * Q(b);
                    } else {
                        grad->dq(a) += nc * nc * g.df;
                        grad->dq(b) -= nc * nc * g.df;
                    }
                }
            }
        }

    const double ks = model.spin_coefficient();
    const double kv = model.vorticity_coefficient();
    if (ks != 0.0 || kv != 0.0) {
        const SkewMatrix rho = s.rho();
        const SkewMatrix tau = s.tau();
        energy += ks * rho.norm_squared() + kv * tau.norm_squared();
        if (grad) {
            auto& gm = grad->dM.upper();
            auto& gn = grad->dN.upper();
            for (std::size_t k = 0; k < gm.size(); ++k) {
                gm[k] += -ks * rho.upper()[k] - kv * tau.upper()[k];
                gn[k] += ks * rho.upper()[k] - kv * tau.upper()[k];
            }
        }
    }
    return energy;
}

}  // namespace

double kinetic_energy(const ModelSpec& model, const ReducedState& state) {
    return kinetic_impl(model, state, nullptr);
}

double hamiltonian(const ModelSpec& model, const PotentialSpec& potential, const ReducedState& state) {
    require_trig_domain(model, potential, state);
    return kinetic_impl(model, state, nullptr) + potential.value(state.q);
}

StateGradient hamiltonian_gradient(const ModelSpec& model, const PotentialSpec& potential,
                                   const ReducedState& state) {
    StateGradient g;
    kinetic_impl(model, state, &g);
    if (!potential.is_zero()) g.dq += potential.gradient(state.q);
    return g;
}

double affaff_hamiltonian_lattice_form(const ModelSpec& model, const PotentialSpec& potential,
                                       const ReducedState& s) {
    if (model.kind != ModelKind::AffAff) throw DomainError("lattice form is defined for AffAff only");
    const int n = s.n();
    const double alpha = model.A;
    const double beta = model.beta(n);
    double t = s.p.squaredNorm() / (2.0 * alpha);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            if (a == b) continue;
            const double half = 0.5 * (s.q(a) - s.q(b));
            const double m = s.M(a, b);
            const double nc = s.N(a, b);
            if (m != 0.0) {
                if (std::abs(2.0 * half) < kCoincidence) degenerate(a, b);
                t += m * m / (32.0 * alpha * std::sinh(half) * std::sinh(half));
            }
            t -= nc * nc / (32.0 * alpha * std::cosh(half) * std::cosh(half));
        }
    const double total = s.p.sum();
    t += total * total / (2.0 * beta);
    return t + potential.value(s.q);
}

double casimir_csl2(const ReducedState& s) {
    const int n = s.n();
    double c = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            const double diff = s.p(a) - s.p(b);
            c += diff * diff / n;
            const double half = 0.5 * (s.q(a) - s.q(b));
            const double m = s.M(a, b);
            const double nc = s.N(a, b);
            if (m != 0.0) {
                if (std::abs(2.0 * half) < kCoincidence) degenerate(a, b);
                c += m * m / (8.0 * std::sinh(half) * std::sinh(half));
            }
            c -= nc * nc / (8.0 * std::cosh(half) * std::cosh(half));
        }
    return c;
}

}  // namespace affine
