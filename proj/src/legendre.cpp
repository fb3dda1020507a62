#include "affine/errors.hpp"
#include "affine/phase.hpp"

#include <cmath>

namespace affine {

namespace {

// Co-moving spins pair with velocities through rho^a_b = dT/d chi^b_a, i.e. the
// negative of the derivative with respect to the independent upper entry.
constexpr double kSpinPairing = -1.0;

// Per-pair kinetic form T_ab = 1/2 [chi theta] K [chi theta]^T.
Eigen::Matrix2d pair_form(const ModelSpec& model, double Qa, double Qb, double d) {
    Eigen::Matrix2d K;
    if (model.kind == ModelKind::DAlembert) {
        const double diag = Qa * Qa + Qb * Qb;
        const double off = -2.0 * Qa * Qb;
        K << diag, off, off, diag;
        return model.I * K;
    }
    const double c = std::cosh(d);
    const double c2 = std::cosh(2.0 * d);
    K << -1.0, c, c, -1.0;
    K *= 2.0 * model.A;
    if (model.kind == ModelKind::AffMetr) {
        Eigen::Matrix2d extra;
        extra << c2, -c, -c, 1.0;
        K += 2.0 * model.I * extra;
    } else if (model.kind == ModelKind::MetrAff) {
        Eigen::Matrix2d extra;
        extra << 1.0, -c, -c, c2;
        K += 2.0 * model.I * extra;
    }
    return K;
}

void require_velocity_form(const ModelSpec& model) {
    switch (model.kind) {
        case ModelKind::DAlembert:
        case ModelKind::AffAff:
        case ModelKind::AffMetr:
        case ModelKind::MetrAff: return;
        default: throw DomainError(std::string(to_string(model.kind)) + " has no velocity-side kinetic form");
    }
}

}  // namespace

ReducedState legendre(const ModelSpec& model, const Vector& q, const PolarVelocity& v) {
    require_velocity_form(model);
    const int n = static_cast<int>(q.size());
    const Vector Q = q.array().exp().matrix();
    ReducedState out(n);
    out.q = q;
    if (model.kind == ModelKind::DAlembert) {
        out.p = model.I * Q.array().square().matrix().cwiseProduct(v.qdot);
    } else {
        const double diagonal = model.A + (model.kind == ModelKind::AffAff ? 0.0 : model.I);
        out.p = diagonal * v.qdot + Vector::Constant(n, model.B * v.qdot.sum());
    }
    SkewMatrix rho(n);
    SkewMatrix tau(n);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            const Eigen::Vector2d w = pair_form(model, Q(a), Q(b), q(a) - q(b)) *
                                      Eigen::Vector2d(v.chi(a, b), v.theta(a, b));
            rho.set(a, b, kSpinPairing * w(0));
            tau.set(a, b, kSpinPairing * w(1));
        }
    return ReducedState::from_spins(out.q, out.p, rho, tau);
}

PolarVelocity inverse_legendre(const ModelSpec& model, const ReducedState& state) {
    const StateGradient g = hamiltonian_gradient(model, PotentialSpec{}, state);
    const int n = state.n();
    PolarVelocity v{g.dp, SkewMatrix(n), SkewMatrix(n)};
    for (std::size_t k = 0; k < g.dM.upper().size(); ++k) {
        const double dm = g.dM.upper()[k];
        const double dn = g.dN.upper()[k];
        v.chi.upper()[k] = kSpinPairing * (dn - dm);
        v.theta.upper()[k] = kSpinPairing * (-dm - dn);
    }
    return v;
}

DalembertMomenta legendre_dalembert(const Vector& D, const Vector& Qdot, const Matrix& chi, const Matrix& theta,
                                    double I) {
    if (!(I > 0.0)) throw DomainError("d'Alembert inertia must be positive");
    if ((D.array() <= 0.0).any()) throw DomainError("stretchings must be positive");
    const Matrix Dm = D.asDiagonal();
    const Matrix D2 = D.array().square().matrix().asDiagonal();
    DalembertMomenta out;
    out.P = I * Qdot;
    out.rho = kSpinPairing * I * (D2 * chi + chi * D2 - 2.0 * Dm * theta * Dm);
    out.tau = kSpinPairing * I * (D2 * theta + theta * D2 - 2.0 * Dm * chi * Dm);
    return out;
}

DalembertVelocities inverse_legendre_dalembert(const Vector& D, const Vector& P, const Matrix& rho,
                                               const Matrix& tau, double I) {
    if (!(I > 0.0)) throw DomainError("d'Alembert inertia must be positive");
    if ((D.array() <= 0.0).any()) throw DomainError("stretchings must be positive");
    const auto n = D.size();
    DalembertVelocities out{P / I, Matrix::Zero(n, n), Matrix::Zero(n, n)};
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = a + 1; b < n; ++b) {
            const double r = kSpinPairing * rho(a, b);
            const double t = kSpinPairing * tau(a, b);
            const double gap = D(a) - D(b);
            const double sum = D(a) + D(b);
            double plus = 0.0;  // chi + theta
            if (std::abs(gap) <= 1e-9 * std::max(D(a), D(b))) {
                const double scale = std::max({1.0, std::abs(r), std::abs(t)});
                if (std::abs(r + t) > 1e-12 * scale)
                    throw DegenerateInertia("coincident stretchings with nonzero M coupling");
            } else {
                plus = (r + t) / (I * gap * gap);
            }
            const double minus = (r - t) / (I * sum * sum);
            out.chi(a, b) = 0.5 * (plus + minus);
            out.theta(a, b) = 0.5 * (plus - minus);
            out.chi(b, a) = -out.chi(a, b);
            out.theta(b, a) = -out.theta(a, b);
        }
    return out;
}

}  // namespace affine
