#pragma once

#include "affine/phase.hpp"

#include <Eigen/Sparse>

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <vector>

namespace affine {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

// Angular momentum matrices of one irreducible block, basis m = -s, ..., s.
// For n = 2 the block is the 1x1 Fourier generator hbar*k stored in S[2].
struct SpinBlock {
    int twice_label = 0;
    double hbar = 1.0;
    std::array<ComplexMatrix, 3> S;

    int dimension() const { return static_cast<int>(S[2].rows()); }
    double label() const { return 0.5 * twice_label; }
    ComplexMatrix casimir() const;
};

SpinBlock spin_matrices(int twice_s, double hbar = 1.0);
SpinBlock fourier_generator(int k, double hbar = 1.0);

// Products over ordered pairs i != j.
double haar_weight(const Vector& q);
double lebesgue_weight(const Vector& Q);
double circular_weight(const Vector& q);  // trigonometric analogue used for TrigUn

// Laplacian of sqrt(weight) divided by sqrt(weight), closed form.
double haar_amended_ratio(const Vector& q);
double circular_amended_ratio(const Vector& q);
double lebesgue_amended_ratio(const Vector& Q);

enum class GridMode { Dilatational, Shape, Full };
enum class Boundary { Dirichlet, Periodic };
enum class WeightKind { Unit, Haar, Lebesgue, Circular };

std::string_view to_string(GridMode mode);
std::string_view to_string(Boundary boundary);

struct Axis {
    double min = 0.0;
    double max = 1.0;
    int points = 64;  // interior unknowns (Dirichlet) or nodes per period (periodic)
};

// Coordinates per mode:
//   Dilatational: qbar (every kind but DAlembert);
//   Shape, n = 2: x = q1 - q2;
//   Shape, n = 3: orthonormal (y1, y2) with q = y1 (1,-1,0)/sqrt2 + y2 (1,1,-2)/sqrt6;
//   Full (DAlembert): the stretchings Q_1..Q_n.
struct SpectralProblem {
    int n = 2;
    ModelSpec model;
    PotentialSpec potential;
    int twice_alpha = 0;  // 2s for n = 3; 2k_alpha for n = 2
    int twice_beta = 0;   // 2j for n = 3; 2k_beta for n = 2
    bool covering = false;
    GridMode mode = GridMode::Dilatational;
    std::vector<Axis> axes{Axis{}};
    Boundary boundary = Boundary::Dirichlet;
    bool use_amended_transform = true;
    bool chamber = true;  // mask nodes outside the ordered chamber q1 > q2 > ...

    void validate() const;
};

void validate_labels(int n, int twice_alpha, int twice_beta, bool covering);

class Grid {
public:
    explicit Grid(const SpectralProblem& problem);

    int n() const { return n_; }
    GridMode mode() const { return mode_; }
    Boundary boundary() const { return boundary_; }
    int dimensions() const { return static_cast<int>(axes_.size()); }
    const std::vector<Axis>& axes() const { return axes_; }
    double step(int axis) const { return steps_[static_cast<std::size_t>(axis)]; }
    double cell_volume() const;

    int active() const { return static_cast<int>(nodes_.size()); }
    Vector coordinates(int node) const;
    Vector coordinates_at(const std::array<double, 3>& index) const;  // fractional lattice index
    std::array<int, 3> lattice_index(int node) const { return nodes_[static_cast<std::size_t>(node)]; }
    // Active neighbour along `axis` in direction +-1; -1 for a wall or an inactive node.
    int neighbor(int node, int axis, int direction) const;

    // Invariants q for the node (log of the stretchings in Full mode).
    Vector invariants(const Vector& coordinates) const;
    // Physical variables the weight is a function of: q, or Q in Full mode.
    Vector weight_arguments(const Vector& coordinates) const;
    double weight(const Vector& coordinates, WeightKind kind) const;
    double weight(int node, WeightKind kind) const { return weight(coordinates(node), kind); }

    // Lattice points dropped because they lie on a coincidence set (weight arguments).
    const std::vector<Vector>& coincidences() const { return coincidences_; }

private:
    int n_;
    GridMode mode_;
    Boundary boundary_;
    std::vector<Axis> axes_;
    std::vector<double> steps_;
    std::vector<std::array<int, 3>> nodes_;
    std::vector<int> lookup_;  // lattice -> active node or -1
    std::array<int, 3> extent_{1, 1, 1};
    std::vector<Vector> coincidences_;
    ModelKind kind_;

    int lattice_offset(const std::array<int, 3>& idx) const;
};

WeightKind measure_of(const SpectralProblem& problem);

struct ReducedOperator {
    SpectralProblem problem;
    Grid grid;
    int rows = 1;  // 2s + 1
    int cols = 1;  // 2j + 1
    Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;
    Vector weights;  // per unknown; all ones in amended variables
    bool amended = true;
    // Lower bound on the spectrum: the stencil part is positive semidefinite,
    // so the smallest eigenvalue of any node's local block bounds it from below.
    double floor = 0.0;

    int dimension() const { return static_cast<int>(matrix.rows()); }
    int block() const { return rows * cols; }
    // Symmetric matrix with the same spectrum (W^1/2 H W^-1/2 in raw form).
    Eigen::SparseMatrix<double, Eigen::RowMajor> symmetric_form() const;
};

ReducedOperator build_reduced_hamiltonian(const SpectralProblem& problem);

// Dense per-node angular coupling contributions (documented for tests).
Matrix angular_casimir_left(int n, int twice_alpha, double hbar);   // ||S||^2 acting on vec(f)
Matrix angular_casimir_right(int n, int twice_beta, double hbar);   // ||V||^2 acting on vec(f)

double angular_shift(const ModelSpec& model, int twice_alpha, int twice_beta, int n = 3);

// Matrix-valued amplitude on the active nodes of a grid, node-major, column-major block.
struct Amplitude {
    int rows = 1;
    int cols = 1;
    std::vector<Complex> values;

    int nodes() const { return static_cast<int>(values.size()) / (rows * cols); }
    Complex& at(int node, int r, int c) { return values[static_cast<std::size_t>((node * cols + c) * rows + r)]; }
    Complex at(int node, int r, int c) const {
        return values[static_cast<std::size_t>((node * cols + c) * rows + r)];
    }
};

Complex inner_product(const Amplitude& f1, const Amplitude& f2, WeightKind weight, const Grid& grid);

struct Spectrum {
    std::vector<double> eigenvalues;
    std::vector<double> residuals;  // ||H v - E v|| for unit v of the symmetric form
    double spectral_radius = 0.0;
    std::vector<Amplitude> eigenvectors;  // normalised under the operator's inner product
};

struct EigenOptions {
    bool vectors = true;
    int dense_limit = 2500;  // larger problems use shift-invert subspace iteration
    double tolerance = 1e-11;
    int max_iterations = 500;
};

Spectrum eigensolve(const ReducedOperator& op, int count, const EigenOptions& options = {});

struct SymmetricEigenpairs {
    Vector values;
    Matrix vectors;
};

// k lowest eigenpairs of a dense symmetric matrix, deterministic ordering.
SymmetricEigenpairs eigensolve_dense(const Matrix& a, int count);
// k lowest eigenpairs of a sparse symmetric matrix by shift-invert subspace iteration.
// Without `lower_bound` the shift comes from Gershgorin discs.
SymmetricEigenpairs eigensolve_sparse(const Eigen::SparseMatrix<double, Eigen::RowMajor>& a, int count,
                                      double tolerance = 1e-11, int max_iterations = 500,
                                      std::optional<double> lower_bound = std::nullopt);

// Independent (s, j) blocks solved concurrently; the serial reference must agree exactly.
std::vector<Spectrum> solve_blocks(std::span<const SpectralProblem> problems, int count,
                                   const EigenOptions& options = {});
std::vector<Spectrum> solve_blocks_serial(std::span<const SpectralProblem> problems, int count,
                                          const EigenOptions& options = {});

// Eigenvalues merged when closer than `tolerance` relative to max(1, |E|).
std::vector<double> distinct_levels(const std::vector<double>& eigenvalues, double tolerance = 1e-9);

}  // namespace affine
