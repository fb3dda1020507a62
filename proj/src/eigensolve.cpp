#include "affine/errors.hpp"
#include "affine/quantum.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <random>

namespace affine {

namespace {

using SparseRow = Eigen::SparseMatrix<double, Eigen::RowMajor>;

constexpr double kClusterTolerance = 1e-10;

// First entry of noticeable size made positive.
void fix_sign(Eigen::Ref<Vector> v) {
    const double top = v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > 1e-8 * top) {
            if (v(i) < 0.0) v *= -1.0;
            return;
        }
    }
}

bool lexicographically_less(const Vector& a, const Vector& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (std::abs(a(i) - b(i)) > 1e-12) return a(i) < b(i);
    }
    return false;
}

SymmetricEigenpairs canonical_order(const Vector& values, Matrix vectors) {
    const auto count = values.size();
    for (Eigen::Index k = 0; k < count; ++k) fix_sign(vectors.col(k));
    std::vector<Eigen::Index> order(static_cast<std::size_t>(count));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return values(a) < values(b); });
    // Within clusters of equal eigenvalues order by eigenvector entries.
    std::size_t start = 0;
    while (start < order.size()) {
        std::size_t stop = start + 1;
        const double anchor = values(order[start]);
        while (stop < order.size() &&
               std::abs(values(order[stop]) - anchor) <= kClusterTolerance * std::max(1.0, std::abs(anchor)))
            ++stop;
        std::sort(order.begin() + static_cast<std::ptrdiff_t>(start), order.begin() + static_cast<std::ptrdiff_t>(stop),
                  [&](Eigen::Index a, Eigen::Index b) {
                      return lexicographically_less(vectors.col(b), vectors.col(a));
                  });
        start = stop;
    }
    SymmetricEigenpairs out{Vector(count), Matrix(vectors.rows(), count)};
    for (Eigen::Index k = 0; k < count; ++k) {
        out.values(k) = values(order[static_cast<std::size_t>(k)]);
        out.vectors.col(k) = vectors.col(order[static_cast<std::size_t>(k)]);
    }
    return out;
}

void require_count(Eigen::Index dim, int count) {
    if (count < 1 || count > dim) throw DomainError("eigenpair count must lie in [1, dimension]");
}

double gershgorin_lower(const SparseRow& a) {
    double bound = std::numeric_limits<double>::infinity();
    for (int row = 0; row < a.outerSize(); ++row) {
        double diag = 0.0;
        double off = 0.0;
        for (SparseRow::InnerIterator it(a, row); it; ++it) {
            if (it.col() == row) diag += it.value();
            else off += std::abs(it.value());
        }
        bound = std::min(bound, diag - off);
    }
    return bound;
}

double power_radius(const SparseRow& a) {
    Vector v = Vector::Ones(a.rows()).normalized();
    double radius = 0.0;
    for (int it = 0; it < 60; ++it) {
        Vector w = a * v;
        radius = w.norm();
        if (radius == 0.0) return 0.0;
        v = w / radius;
    }
    return radius;
}

}  // namespace

SymmetricEigenpairs eigensolve_dense(const Matrix& a, int count) {
    require_count(a.rows(), count);
    if (a.rows() != a.cols()) throw ShapeMismatch("matrix must be square");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
    if (solver.info() != Eigen::Success) throw ConvergenceFailure("dense symmetric eigensolver failed");
    SymmetricEigenpairs all = canonical_order(solver.eigenvalues(), solver.eigenvectors());
    return {all.values.head(count), all.vectors.leftCols(count)};
}

SymmetricEigenpairs eigensolve_sparse(const SparseRow& a, int count, double tolerance, int max_iterations,
                                      std::optional<double> lower_bound) {
    require_count(a.rows(), count);
    const Eigen::Index dim = a.rows();
    const Eigen::Index width = std::min<Eigen::Index>(dim, std::max(2 * count, count + 10));

    // Shift below the spectrum keeps (A - sigma) positive definite for LDL^T.
    const double lower = lower_bound ? *lower_bound : gershgorin_lower(a);
    const double sigma = lower - 1e-6 * std::max(1.0, std::abs(lower));
    Eigen::SparseMatrix<double> shifted = a;
    for (Eigen::Index i = 0; i < dim; ++i) shifted.coeffRef(i, i) -= sigma;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor(shifted);
    if (factor.info() != Eigen::Success) throw ConvergenceFailure("shift-invert factorization failed");

    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> normal;
    Matrix basis(dim, width);
    for (Eigen::Index j = 0; j < width; ++j)
        for (Eigen::Index i = 0; i < dim; ++i) basis(i, j) = normal(rng);

    const double radius = std::max(power_radius(a), std::numeric_limits<double>::min());
    Vector ritz;
    for (int iteration = 0; iteration < max_iterations; ++iteration) {
        Matrix next = factor.solve(basis);
        Eigen::HouseholderQR<Matrix> qr(next);
        basis = qr.householderQ() * Matrix::Identity(dim, width);
        const Matrix projected = basis.transpose() * (a * basis);
        Eigen::SelfAdjointEigenSolver<Matrix> small(0.5 * (projected + projected.transpose()));
        basis = basis * small.eigenvectors();
        ritz = small.eigenvalues();
        const Matrix residual = a * basis.leftCols(count) - basis.leftCols(count) * ritz.head(count).asDiagonal();
        if (residual.colwise().norm().maxCoeff() <= tolerance * radius) {
            SymmetricEigenpairs out = canonical_order(ritz.head(count), basis.leftCols(count));
            return out;
        }
    }
    throw ConvergenceFailure("subspace iteration did not converge");
}

Spectrum eigensolve(const ReducedOperator& op, int count, const EigenOptions& options) {
    const SparseRow symmetric = op.symmetric_form();
    require_count(symmetric.rows(), count);
    SymmetricEigenpairs pairs;
    Spectrum out;
    if (symmetric.rows() <= options.dense_limit) {
        const Matrix dense = symmetric.toDense();
        Eigen::SelfAdjointEigenSolver<Matrix> solver(dense);
        if (solver.info() != Eigen::Success) throw ConvergenceFailure("dense symmetric eigensolver failed");
        out.spectral_radius = solver.eigenvalues().cwiseAbs().maxCoeff();
        SymmetricEigenpairs all = canonical_order(solver.eigenvalues(), solver.eigenvectors());
        pairs = {all.values.head(count), all.vectors.leftCols(count)};
    } else {
        pairs = eigensolve_sparse(symmetric, count, options.tolerance, options.max_iterations, op.floor);
        out.spectral_radius = power_radius(symmetric);
    }

    const Matrix residual = symmetric * pairs.vectors - pairs.vectors * pairs.values.asDiagonal();
    const int block = op.block();
    const double scale = std::sqrt(static_cast<double>(block) / op.grid.cell_volume());
    for (int k = 0; k < count; ++k) {
        out.eigenvalues.push_back(pairs.values(k));
        out.residuals.push_back(residual.col(k).norm());
        if (!options.vectors) continue;
        // Unit vectors of the symmetric form -> amplitudes normalised under the operator's product.
        Amplitude amp{op.rows, op.cols, std::vector<Complex>(static_cast<std::size_t>(symmetric.rows()))};
        for (Eigen::Index i = 0; i < symmetric.rows(); ++i)
            amp.values[static_cast<std::size_t>(i)] = pairs.vectors(i, k) * scale / std::sqrt(op.weights(i));
        out.eigenvectors.push_back(std::move(amp));
    }
    return out;
}

std::vector<Spectrum> solve_blocks_serial(std::span<const SpectralProblem> problems, int count,
                                          const EigenOptions& options) {
    std::vector<Spectrum> out;
    out.reserve(problems.size());
    for (const auto& problem : problems) out.push_back(eigensolve(build_reduced_hamiltonian(problem), count, options));
    return out;
}

std::vector<Spectrum> solve_blocks(std::span<const SpectralProblem> problems, int count, const EigenOptions& options) {
    std::vector<Spectrum> out(problems.size());
    const auto total = static_cast<std::ptrdiff_t>(problems.size());
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < total; ++i) {
        try {
            const auto k = static_cast<std::size_t>(i);
            out[k] = eigensolve(build_reduced_hamiltonian(problems[k]), count, options);
        } catch (...) {
#pragma omp critical(affine_block_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

std::vector<double> distinct_levels(const std::vector<double>& eigenvalues, double tolerance) {
    std::vector<double> out;
    for (double e : eigenvalues) {
        if (out.empty() || std::abs(e - out.back()) > tolerance * std::max(1.0, std::abs(e))) out.push_back(e);
    }
    return out;
}

}  // namespace affine
