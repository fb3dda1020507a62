#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace affine {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Configuration {
    Matrix phi;
    std::optional<Vector> x;

    int n() const { return static_cast<int>(phi.rows()); }
};

// phi = U * A with U special-orthogonal and A symmetric positive-definite.
struct Polar {
    Matrix U;
    Matrix A;

    // Spatial form phi = B * U.
    Matrix B() const { return U * A * U.transpose(); }
};

// phi = L * diag(exp q) * R^T, q non-increasing, det L = det R = +1.
struct TwoPolar {
    Matrix L;
    Vector q;
    Matrix R;

    Matrix reconstruct() const;
    Vector stretchings() const { return q.array().exp().matrix(); }
};

struct DeformationData {
    Matrix G;           // Green: phi^T phi
    Matrix C;           // Cauchy: (phi phi^T)^-1
    Vector invariants;  // I_p = Tr(G^p), p = 1..n

    Matrix lagrange_strain() const { return 0.5 * (G - Matrix::Identity(G.rows(), G.cols())); }
    Matrix euler_strain() const { return 0.5 * (Matrix::Identity(C.rows(), C.cols()) - C); }
};

struct InternalVelocity {
    Matrix Omega;     // phi_dot phi^-1
    Matrix OmegaHat;  // phi^-1 phi_dot
};

// Throws SingularConfiguration when det <= 0, entries are non-finite, or
// sigma_min < 1e-12 sigma_max.
void require_admissible(const Matrix& phi);

Polar polar_decompose(const Matrix& phi);
TwoPolar two_polar(const Matrix& phi);

// Same factorization with the joint column signs chosen closest to `reference`;
// used to follow a smooth motion away from degeneracies.
TwoPolar two_polar_aligned(const Matrix& phi, const TwoPolar& reference);

DeformationData deformation(const Matrix& phi);
InternalVelocity affine_velocity(const Matrix& phi, const Matrix& phi_dot);
double degeneracy_margin(const Vector& q);

// Nearest special-orthogonal matrix (orthogonal polar factor).
Matrix project_to_rotation(const Matrix& m);

// Batch kernels: the OpenMP version and its serial reference must agree exactly.
std::vector<TwoPolar> two_polar_batch(std::span<const Matrix> phis);
std::vector<TwoPolar> two_polar_batch_serial(std::span<const Matrix> phis);

// Random configurations U diag(sigma) V^T with sigma_max / sigma_min <= max_condition.
std::vector<Matrix> random_configurations(std::uint64_t seed, int count, int n, double max_condition);

struct DecompositionReport {
    int trials = 0;
    std::uint64_t seed = 0;
    double reconstruction = 0.0;  // max ||L D R^T - phi|| / ||phi||
    double orthogonality = 0.0;   // max of ||L^T L - I||, ||R^T R - I||
    double singular_gap = 0.0;    // max |sigma - sqrt(eig(phi^T phi))| / sigma_max
    bool passed() const { return reconstruction < 1e-10 && orthogonality < 1e-12 && singular_gap < 1e-9; }
};

// Mixed n = 2 and n = 3 configurations when n == 0.
DecompositionReport check_decomposition(std::uint64_t seed, int trials, int n = 0, double max_condition = 1e6);

}  // namespace affine
