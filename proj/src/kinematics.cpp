#include "affine/kinematics.hpp"

#include "affine/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace affine {

namespace {

constexpr double kConditionFloor = 1e-12;
constexpr double kTotalDegeneracy = 1e-12;

struct Svd {
    Matrix U;
    Vector sigma;
    Matrix V;
};

Svd checked_svd(const Matrix& phi) {
    if (phi.rows() != phi.cols() || phi.rows() == 0)
        throw SingularConfiguration("configuration matrix must be square and non-empty");
    if (!phi.allFinite()) throw SingularConfiguration("configuration has non-finite entries");
    if (!(phi.determinant() > 0.0)) throw SingularConfiguration("configuration must have det > 0");
    Eigen::JacobiSVD<Matrix> svd(phi, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Svd out{svd.matrixU(), svd.singularValues(), svd.matrixV()};
    const double top = out.sigma(0);
    const double bottom = out.sigma(out.sigma.size() - 1);
    if (!(bottom >= kConditionFloor * top))
        throw SingularConfiguration("configuration too close to singular (sigma_min < 1e-12 sigma_max)");
    return out;
}

// Flip the last column pair jointly so both factors are proper rotations.
void fix_orientation(Matrix& L, Matrix& R) {
    if (L.determinant() < 0.0) {
        const auto last = L.cols() - 1;
        L.col(last) *= -1.0;
        R.col(last) *= -1.0;
    }
}

}  // namespace

Matrix TwoPolar::reconstruct() const { return L * stretchings().asDiagonal() * R.transpose(); }

void require_admissible(const Matrix& phi) { (void)checked_svd(phi); }

Polar polar_decompose(const Matrix& phi) {
    const Svd s = checked_svd(phi);
    Polar out;
    out.U = s.U * s.V.transpose();
    out.A = s.V * s.sigma.asDiagonal() * s.V.transpose();
    out.A = 0.5 * (out.A + out.A.transpose());
    return out;
}

TwoPolar two_polar(const Matrix& phi) {
    const Svd s = checked_svd(phi);
    TwoPolar out;
    out.q = s.sigma.array().log().matrix();
    const double spread = out.q(0) - out.q(out.q.size() - 1);
    if (spread < kTotalDegeneracy) {
        // D proportional to identity: only L R^T is meaningful.
        const double scale = std::exp(out.q.mean());
        out.q.setConstant(out.q.mean());
        out.R = Matrix::Identity(phi.rows(), phi.cols());
        out.L = project_to_rotation(phi / scale);
        return out;
    }
    out.L = s.U;
    out.R = s.V;
    fix_orientation(out.L, out.R);
    return out;
}

TwoPolar two_polar_aligned(const Matrix& phi, const TwoPolar& reference) {
    TwoPolar out = two_polar(phi);
    if (reference.L.rows() != out.L.rows()) return out;
    for (Eigen::Index k = 0; k < out.L.cols(); ++k) {
        if (out.L.col(k).dot(reference.L.col(k)) < 0.0) {
            out.L.col(k) *= -1.0;
            out.R.col(k) *= -1.0;
        }
    }
    return out;
}

DeformationData deformation(const Matrix& phi) {
    require_admissible(phi);
    const auto n = phi.rows();
    DeformationData out;
    out.G = phi.transpose() * phi;
    out.C = (phi * phi.transpose()).inverse();
    out.C = 0.5 * (out.C + out.C.transpose());
    out.invariants.resize(n);
    Matrix power = Matrix::Identity(n, n);
    for (Eigen::Index p = 0; p < n; ++p) {
        power = power * out.G;
        out.invariants(p) = power.trace();
    }
    return out;
}

InternalVelocity affine_velocity(const Matrix& phi, const Matrix& phi_dot) {
    require_admissible(phi);
    if (phi_dot.rows() != phi.rows() || phi_dot.cols() != phi.cols())
        throw SingularConfiguration("velocity shape does not match configuration");
    InternalVelocity out;
    out.OmegaHat = phi.partialPivLu().solve(phi_dot);
    out.Omega = phi.transpose().partialPivLu().solve(phi_dot.transpose()).transpose();
    return out;
}

double degeneracy_margin(const Vector& q) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < q.size(); ++i)
        for (Eigen::Index j = i + 1; j < q.size(); ++j) best = std::min(best, std::abs(q(i) - q(j)));
    return best;
}

Matrix project_to_rotation(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Matrix U = svd.matrixU();
    const Matrix& V = svd.matrixV();
    if ((U * V.transpose()).determinant() < 0.0) U.col(U.cols() - 1) *= -1.0;
    return U * V.transpose();
}

std::vector<TwoPolar> two_polar_batch_serial(std::span<const Matrix> phis) {
    std::vector<TwoPolar> out;
    out.reserve(phis.size());
    for (const auto& phi : phis) out.push_back(two_polar(phi));
    return out;
}

std::vector<TwoPolar> two_polar_batch(std::span<const Matrix> phis) {
    std::vector<TwoPolar> out(phis.size());
    const auto count = static_cast<std::ptrdiff_t>(phis.size());
    // Exceptions cannot cross the parallel region; park the first one.
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        try {
            out[static_cast<std::size_t>(i)] = two_polar(phis[static_cast<std::size_t>(i)]);
        } catch (...) {
#pragma omp critical(affine_batch_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

}  // namespace affine

namespace affine {

std::vector<Matrix> random_configurations(std::uint64_t seed, int count, int n, double max_condition) {
    if (count < 0 || (n != 0 && n < 1) || !(max_condition >= 1.0)) throw DomainError("bad random configuration request");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unit;
    auto orthogonal = [&](int dim) {
        Matrix g(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) g(i, j) = normal(rng);
        Eigen::HouseholderQR<Matrix> qr(g);
        Matrix q = qr.householderQ();
        if (q.determinant() < 0.0) q.col(0) *= -1.0;
        return q;
    };
    std::vector<Matrix> out;
    out.reserve(static_cast<std::size_t>(count));
    const double span = std::log(max_condition);
    for (int k = 0; k < count; ++k) {
        const int dim = n == 0 ? 2 + k % 2 : n;
        Vector sigma(dim);
        for (int i = 0; i < dim; ++i) sigma(i) = std::exp(-span * unit(rng));
        sigma(0) = 1.0;  // pins sigma_max and the condition bound
        out.push_back(orthogonal(dim) * sigma.asDiagonal() * orthogonal(dim).transpose());
    }
    return out;
}

DecompositionReport check_decomposition(std::uint64_t seed, int trials, int n, double max_condition) {
    if (trials < 1) throw DomainError("trials must be >= 1");
    DecompositionReport report;
    report.trials = trials;
    report.seed = seed;
    const std::vector<Matrix> phis = random_configurations(seed, trials, n, max_condition);
    const std::vector<TwoPolar> results = two_polar_batch(phis);
    for (std::size_t k = 0; k < phis.size(); ++k) {
        const Matrix& phi = phis[k];
        const TwoPolar& tp = results[k];
        const auto dim = phi.rows();
        const Matrix id = Matrix::Identity(dim, dim);
        report.reconstruction = std::max(report.reconstruction, (tp.reconstruct() - phi).norm() / phi.norm());
        report.orthogonality = std::max({report.orthogonality, (tp.L.transpose() * tp.L - id).norm(),
                                         (tp.R.transpose() * tp.R - id).norm()});
        // Eigenvalues of the Green tensor, ascending, against descending stretchings.
        Eigen::SelfAdjointEigenSolver<Matrix> oracle(phi.transpose() * phi, Eigen::EigenvaluesOnly);
        const Vector sigma = tp.stretchings();
        const Vector reference = oracle.eigenvalues().reverse().cwiseMax(0.0).cwiseSqrt();
        report.singular_gap = std::max(report.singular_gap, (sigma - reference).cwiseAbs().maxCoeff() / sigma.maxCoeff());
    }
    return report;
}

}  // namespace affine
