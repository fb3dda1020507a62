#pragma once

// Hand-rolled generators for property tests.
#include "affine/phase.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace affine::testing {

class Draw {
public:
    explicit Draw(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    double normal() { return std::normal_distribution<double>()(rng_); }

    Matrix gaussian(int rows, int cols) {
        Matrix m(rows, cols);
        for (double& v : m.reshaped()) v = normal();
        return m;
    }

    Matrix orthogonal(int n) {
        Eigen::HouseholderQR<Matrix> qr(gaussian(n, n));
        Matrix Q = qr.householderQ();
        if (Q.determinant() < 0.0) Q.col(0) *= -1.0;
        return Q;
    }

    // Positive determinant, singular values within [0.2, 5].
    Matrix configuration(int n) {
        Vector sigma(n);
        for (int k = 0; k < n; ++k) sigma(k) = std::exp(uniform(-1.5, 1.5));
        return orthogonal(n) * sigma.asDiagonal() * orthogonal(n).transpose();
    }

    Matrix skew(int n, double scale = 1.0) {
        Matrix g = gaussian(n, n);
        return scale * 0.5 * (g - g.transpose());
    }

    // Strictly descending invariants separated by at least `gap`.
    Vector separated_q(int n, double gap = 0.3) {
        Vector q(n);
        q(0) = uniform(-0.5, 0.5);
        for (int k = 1; k < n; ++k) q(k) = q(k - 1) - gap - uniform(0.0, 0.7);
        return q.array() - q.mean();
    }

    // Invariants separated as in separated_q, so the reduced flow starts away from coincidences.
    Matrix separated_configuration(int n, double gap = 0.3) {
        const Vector sigma = separated_q(n, gap).array().exp();
        return orthogonal(n) * sigma.asDiagonal() * orthogonal(n).transpose();
    }

    ReducedState state(int n, double scale = 0.5) {
        ReducedState s(n);
        s.q = separated_q(n);
        for (int a = 0; a < n; ++a) s.p(a) = scale * normal();
        for (double& v : s.M.upper()) v = scale * normal();
        for (double& v : s.N.upper()) v = scale * normal();
        return s;
    }

    // Couplings bounded away from zero keep the centrifugal barriers up, so
    // orbits stay clear of the coincidence set.
    ReducedState nondegenerate_state(int n) {
        ReducedState s(n);
        s.q = separated_q(n);
        for (int a = 0; a < n; ++a) s.p(a) = 0.3 * normal();
        const auto coupling = [this] { return (uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0) * uniform(0.4, 1.0); };
        for (double& v : s.M.upper()) v = coupling();
        for (double& v : s.N.upper()) v = coupling();
        return s;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

inline Matrix rotation2(double angle) {
    return Matrix{{std::cos(angle), -std::sin(angle)}, {std::sin(angle), std::cos(angle)}};
}

}  // namespace affine::testing
