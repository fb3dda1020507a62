#include "affine/errors.hpp"
#include "affine/quantum.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <numbers>

namespace affine {

namespace {

constexpr int kMinPoints = 16;
constexpr long kMaxFullNodes = 64L * 64L * 64L;
constexpr double kCoincidence = 1e-12;

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
const double kInvSqrt6 = 1.0 / std::sqrt(6.0);

// Pair (a, b) of a 3 x 3 skew matrix to the axial component it represents.
int component_of(int a, int b) { return 3 - a - b; }

bool coincident_pair(ModelKind kind, double gap) {
    if (kind == ModelKind::TrigUn)
        return std::abs(wrap_angle(gap)) < kCoincidence ||
               std::abs(wrap_angle(gap - std::numbers::pi)) < kCoincidence;
    return std::abs(gap) < kCoincidence;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Matrix real_square(const ComplexMatrix& x) {
    Matrix sq = (x * x).real();
    return 0.5 * (sq + sq.transpose());
}

// Angular coupling blocks acting on vec(f), f of shape rows x cols (column-major).
struct Couplings {
    int rows = 1;
    int cols = 1;
    std::array<Matrix, 3> difference;  // (right S^beta - left S^alpha)^2 per component
    std::array<Matrix, 3> sum;         // (right S^beta + left S^alpha)^2
    std::array<bool, 3> difference_live{};
    std::array<bool, 3> sum_live{};
};

Couplings angular_couplings(const SpectralProblem& problem) {
    Couplings out;
    const double hbar = problem.model.hbar;
    if (problem.n == 2) {
        const double ka = 0.5 * problem.twice_alpha;
        const double kb = 0.5 * problem.twice_beta;
        out.difference[0] = Matrix::Constant(1, 1, hbar * hbar * (kb - ka) * (kb - ka));
        out.sum[0] = Matrix::Constant(1, 1, hbar * hbar * (kb + ka) * (kb + ka));
        out.difference_live[0] = out.difference[0](0, 0) != 0.0;
        out.sum_live[0] = out.sum[0](0, 0) != 0.0;
        return out;
    }
    const SpinBlock left = spin_matrices(problem.twice_alpha, hbar);
    const SpinBlock right = spin_matrices(problem.twice_beta, hbar);
    out.rows = left.dimension();
    out.cols = right.dimension();
    const ComplexMatrix id_rows = ComplexMatrix::Identity(out.rows, out.rows);
    const ComplexMatrix id_cols = ComplexMatrix::Identity(out.cols, out.cols);
    for (int c = 0; c < 3; ++c) {
        // vec(f S) = (S^T kron I) vec f and vec(S f) = (I kron S) vec f.
        const ComplexMatrix acting_right = kron(right.S[static_cast<std::size_t>(c)].transpose(), id_rows);
        const ComplexMatrix acting_left = kron(id_cols, left.S[static_cast<std::size_t>(c)]);
        out.difference[static_cast<std::size_t>(c)] = real_square(acting_right - acting_left);
        out.sum[static_cast<std::size_t>(c)] = real_square(acting_right + acting_left);
        out.difference_live[static_cast<std::size_t>(c)] = out.difference[static_cast<std::size_t>(c)].norm() != 0.0;
        out.sum_live[static_cast<std::size_t>(c)] = out.sum[static_cast<std::size_t>(c)].norm() != 0.0;
    }
    return out;
}

std::size_t pair_slot(int n, int a, int b) { return n == 2 ? 0 : static_cast<std::size_t>(component_of(a, b)); }

void check_coincidences(const SpectralProblem& problem, const Grid& grid, const Couplings& couplings) {
    if (problem.mode == GridMode::Dilatational) return;
    const int n = problem.n;
    for (const Vector& args : grid.coincidences()) {
        for (int a = 0; a < n; ++a) {
            for (int b = a + 1; b < n; ++b) {
                const double gap = args(a) - args(b);
                if (!coincident_pair(problem.model.kind, gap)) continue;
                const std::size_t slot = pair_slot(n, a, b);
                const bool sum_wall = problem.model.kind == ModelKind::TrigUn &&
                                      std::abs(wrap_angle(gap - std::numbers::pi)) < kCoincidence;
                const bool live = sum_wall ? couplings.sum_live[slot] : couplings.difference_live[slot];
                if (live) throw SingularWeight("grid node on a coincidence with a nonvanishing coupling block");
            }
        }
    }
}

// Multiplier of the difference and sum couplings for one pair.
std::pair<double, double> pair_factors(const SpectralProblem& problem, double gap, double Qa, double Qb) {
    const double inertia = problem.model.shear_inertia();
    switch (problem.model.kind) {
        case ModelKind::DAlembert:
            return {1.0 / (4.0 * inertia * (Qa - Qb) * (Qa - Qb)), 1.0 / (4.0 * inertia * (Qa + Qb) * (Qa + Qb))};
        case ModelKind::TrigUn: {
            const double s = std::sin(0.5 * gap);
            const double c = std::cos(0.5 * gap);
            return {1.0 / (16.0 * inertia * s * s), 1.0 / (16.0 * inertia * c * c)};
        }
        default: {
            const double s = std::sinh(0.5 * gap);
            const double c = std::cosh(0.5 * gap);
            return {1.0 / (16.0 * inertia * s * s), -1.0 / (16.0 * inertia * c * c)};
        }
    }
}

}  // namespace

std::string_view to_string(GridMode mode) {
    switch (mode) {
        case GridMode::Dilatational: return "dilatational";
        case GridMode::Shape: return "shape";
        case GridMode::Full: return "full";
    }
    return "?";
}

std::string_view to_string(Boundary boundary) { return boundary == Boundary::Periodic ? "periodic" : "dirichlet"; }

void SpectralProblem::validate() const {
    validate_labels(n, twice_alpha, twice_beta, covering);
    model.validate(n);
    if (!(model.hbar > 0.0) || !std::isfinite(model.hbar)) throw DomainError("hbar must be positive");
    const bool dalembert = model.kind == ModelKind::DAlembert;
    std::size_t expected = 1;
    switch (mode) {
        case GridMode::Dilatational:
            if (dalembert) throw DomainError("d'Alembert model has no separated dilatational mode");
            break;
        case GridMode::Shape:
            if (dalembert) throw DomainError("d'Alembert spectra use the full stretching grid");
            expected = n == 2 ? 1 : 2;
            break;
        case GridMode::Full:
            if (!dalembert) throw DomainError("full grids are provided for the d'Alembert model");
            if (boundary == Boundary::Periodic) throw DomainError("stretching grids use Dirichlet walls");
            expected = static_cast<std::size_t>(n);
            break;
    }
    if (axes.size() != expected)
        throw DomainError("grid needs " + std::to_string(expected) + " axes for this mode");
    long total = 1;
    for (const Axis& axis : axes) {
        if (axis.points < kMinPoints) throw GridTooCoarse("grid axes need at least 16 points");
        if (!(axis.max > axis.min) || !std::isfinite(axis.min) || !std::isfinite(axis.max))
            throw DomainError("grid axis needs max > min");
        total *= axis.points;
    }
    if (mode == GridMode::Full && total > kMaxFullNodes) throw DomainError("full grids are limited to 64^3 nodes");
}

WeightKind measure_of(const SpectralProblem& problem) {
    switch (problem.mode) {
        case GridMode::Dilatational: return WeightKind::Unit;
        case GridMode::Full: return WeightKind::Lebesgue;
        case GridMode::Shape: return problem.model.kind == ModelKind::TrigUn ? WeightKind::Circular : WeightKind::Haar;
    }
    return WeightKind::Unit;
}

Grid::Grid(const SpectralProblem& problem)
    : n_(problem.n), mode_(problem.mode), boundary_(problem.boundary), axes_(problem.axes), kind_(problem.model.kind) {
    problem.validate();
    for (std::size_t k = 0; k < axes_.size(); ++k) {
        const Axis& axis = axes_[k];
        const double span = axis.max - axis.min;
        steps_.push_back(boundary_ == Boundary::Periodic ? span / axis.points : span / (axis.points + 1));
        extent_[k] = axis.points;
    }
    lookup_.assign(static_cast<std::size_t>(extent_[0]) * extent_[1] * extent_[2], -1);

    const bool ordered = problem.chamber && kind_ != ModelKind::TrigUn;
    auto keep = [&](const Vector& x) {
        if (mode_ == GridMode::Dilatational) return std::isfinite(problem.potential.dilatational(x(0)));
        if (mode_ == GridMode::Full && (x.array() <= 0.0).any()) return false;
        const Vector args = weight_arguments(x);
        for (int a = 0; a < n_; ++a)
            for (int b = a + 1; b < n_; ++b)
                if (ordered && args(a) - args(b) <= kCoincidence) return false;
        for (int a = 0; a < n_; ++a) {
            for (int b = a + 1; b < n_; ++b) {
                if (coincident_pair(kind_, args(a) - args(b))) {
                    coincidences_.push_back(args);
                    return false;
                }
            }
        }
        return std::isfinite(problem.potential.value(invariants(x)));
    };

    std::array<int, 3> idx{};
    for (idx[2] = 0; idx[2] < extent_[2]; ++idx[2]) {
        for (idx[1] = 0; idx[1] < extent_[1]; ++idx[1]) {
            for (idx[0] = 0; idx[0] < extent_[0]; ++idx[0]) {
                const Vector x = coordinates_at({double(idx[0]), double(idx[1]), double(idx[2])});
                if (!keep(x)) continue;
                lookup_[static_cast<std::size_t>(lattice_offset(idx))] = static_cast<int>(nodes_.size());
                nodes_.push_back(idx);
            }
        }
    }
    if (nodes_.empty()) throw DomainError("grid has no admissible nodes");
}

int Grid::lattice_offset(const std::array<int, 3>& idx) const {
    return idx[0] + extent_[0] * (idx[1] + extent_[1] * idx[2]);
}

double Grid::cell_volume() const {
    double out = 1.0;
    for (double h : steps_) out *= h;
    return out;
}

Vector Grid::coordinates_at(const std::array<double, 3>& index) const {
    Vector x(dimensions());
    const double offset = boundary_ == Boundary::Periodic ? 0.0 : 1.0;
    for (int k = 0; k < dimensions(); ++k)
        x(k) = axes_[static_cast<std::size_t>(k)].min + (index[static_cast<std::size_t>(k)] + offset) * steps_[static_cast<std::size_t>(k)];
    return x;
}

Vector Grid::coordinates(int node) const {
    const auto& idx = nodes_[static_cast<std::size_t>(node)];
    return coordinates_at({double(idx[0]), double(idx[1]), double(idx[2])});
}

int Grid::neighbor(int node, int axis, int direction) const {
    std::array<int, 3> idx = nodes_[static_cast<std::size_t>(node)];
    const auto k = static_cast<std::size_t>(axis);
    idx[k] += direction;
    if (idx[k] < 0 || idx[k] >= extent_[k]) {
        if (boundary_ != Boundary::Periodic) return -1;
        idx[k] = (idx[k] + extent_[k]) % extent_[k];
    }
    return lookup_[static_cast<std::size_t>(lattice_offset(idx))];
}

Vector Grid::invariants(const Vector& x) const {
    switch (mode_) {
        case GridMode::Dilatational: return Vector::Constant(n_, x(0));
        case GridMode::Shape:
            if (n_ == 2) return Vector{{0.5 * x(0), -0.5 * x(0)}};
            return Vector{{x(0) * kInvSqrt2 + x(1) * kInvSqrt6, -x(0) * kInvSqrt2 + x(1) * kInvSqrt6,
                           -2.0 * x(1) * kInvSqrt6}};
        case GridMode::Full: return x.array().log().matrix();
    }
    return x;
}

Vector Grid::weight_arguments(const Vector& x) const { return mode_ == GridMode::Full ? x : invariants(x); }

double Grid::weight(const Vector& x, WeightKind kind) const {
    switch (kind) {
        case WeightKind::Unit: return 1.0;
        case WeightKind::Haar: return haar_weight(invariants(x));
        case WeightKind::Circular: return circular_weight(invariants(x));
        case WeightKind::Lebesgue: return lebesgue_weight(weight_arguments(x));
    }
    return 1.0;
}

Eigen::SparseMatrix<double, Eigen::RowMajor> ReducedOperator::symmetric_form() const {
    if (amended) return matrix;
    Eigen::SparseMatrix<double, Eigen::RowMajor> out = matrix;
    const Vector root = weights.array().sqrt().matrix();
    for (int row = 0; row < out.outerSize(); ++row)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(out, row); it; ++it)
            it.valueRef() *= root(row) / root(it.col());
    // Rounding in the rescaling leaves ~1 ulp asymmetry; average it away.
    Eigen::SparseMatrix<double, Eigen::RowMajor> transposed = out.transpose();
    return 0.5 * (out + transposed);
}

ReducedOperator build_reduced_hamiltonian(const SpectralProblem& problem) {
    ReducedOperator op{problem, Grid(problem), 1, 1, {}, {}, problem.use_amended_transform};
    const Grid& grid = op.grid;
    const Couplings couplings = angular_couplings(problem);
    op.rows = couplings.rows;
    op.cols = couplings.cols;
    check_coincidences(problem, grid, couplings);

    const ModelSpec& model = problem.model;
    const int n = problem.n;
    const int block = op.block();
    const double hbar2 = model.hbar * model.hbar;
    const WeightKind measure = measure_of(problem);

    // -sum_k c_k d^2/dx_k^2 in grid coordinates.
    double coefficient = 0.0;
    double amended_coefficient = 0.0;
    switch (problem.mode) {
        case GridMode::Dilatational: coefficient = hbar2 / (2.0 * model.dilatation_inertia(n)); break;
        case GridMode::Shape:
            coefficient = n == 2 ? hbar2 / model.shear_inertia() : hbar2 / (2.0 * model.shear_inertia());
            amended_coefficient = hbar2 / (2.0 * model.shear_inertia());
            break;
        case GridMode::Full:
            coefficient = hbar2 / (2.0 * model.shear_inertia());
            amended_coefficient = coefficient;
            break;
    }
    const double shift = problem.mode == GridMode::Full
                             ? 0.0
                             : angular_shift(model, problem.twice_alpha, problem.twice_beta, n);

    const int nodes = grid.active();
    op.weights = Vector::Ones(static_cast<Eigen::Index>(nodes) * block);
    Vector node_weight = Vector::Ones(nodes);
    if (!op.amended && measure != WeightKind::Unit)
        for (int i = 0; i < nodes; ++i) node_weight(i) = grid.weight(i, measure);
    for (int i = 0; i < nodes; ++i) op.weights.segment(static_cast<Eigen::Index>(i) * block, block).setConstant(node_weight(i));

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(nodes) * block * (block + 2 * grid.dimensions()));
    Matrix local(block, block);
    op.floor = std::numeric_limits<double>::infinity();
    for (int i = 0; i < nodes; ++i) {
        const Vector x = grid.coordinates(i);
        const Vector q = grid.invariants(x);
        local.setZero();
        double scalar = shift;
        if (problem.mode == GridMode::Dilatational) {
            scalar += problem.potential.dilatational(x(0));
        } else {
            scalar += problem.potential.value(q);
            const Vector args = grid.weight_arguments(x);
            if (op.amended) {
                double ratio = 0.0;
                if (measure == WeightKind::Haar) ratio = haar_amended_ratio(q);
                else if (measure == WeightKind::Circular) ratio = circular_amended_ratio(q);
                else ratio = lebesgue_amended_ratio(args);
                scalar += amended_coefficient * ratio;
            }
            for (int a = 0; a < n; ++a) {
                for (int b = a + 1; b < n; ++b) {
                    const std::size_t slot = pair_slot(n, a, b);
                    if (!couplings.difference_live[slot] && !couplings.sum_live[slot]) continue;
                    const auto [fd, fs] = pair_factors(problem, q(a) - q(b), args(a), args(b));
                    if (couplings.difference_live[slot]) local += fd * couplings.difference[slot];
                    if (couplings.sum_live[slot]) local += fs * couplings.sum[slot];
                }
            }
        }

        const double potential_part = scalar;
        const double local_floor = block == 1 ? local(0, 0)
                                              : Eigen::SelfAdjointEigenSolver<Matrix>(local, Eigen::EigenvaluesOnly)
                                                    .eigenvalues()(0);
        op.floor = std::min(op.floor, potential_part + local_floor);

        const std::array<double, 3> here{double(grid.lattice_index(i)[0]), double(grid.lattice_index(i)[1]),
                                         double(grid.lattice_index(i)[2])};
        for (int axis = 0; axis < grid.dimensions(); ++axis) {
            const double h2 = grid.step(axis) * grid.step(axis);
            for (int dir : {-1, 1}) {
                const int j = grid.neighbor(i, axis, dir);
                double link = coefficient / h2;
                if (!op.amended && measure != WeightKind::Unit) {
                    std::array<double, 3> mid = here;
                    mid[static_cast<std::size_t>(axis)] += 0.5 * dir;
                    link *= grid.weight(grid.coordinates_at(mid), measure) / node_weight(i);
                }
                scalar += link;
                if (j < 0) continue;
                for (int r = 0; r < block; ++r) triplets.emplace_back(i * block + r, j * block + r, -link);
            }
        }
        for (int r = 0; r < block; ++r) {
            triplets.emplace_back(i * block + r, i * block + r, scalar + local(r, r));
            for (int c = 0; c < block; ++c)
                if (c != r && local(r, c) != 0.0) triplets.emplace_back(i * block + r, i * block + c, local(r, c));
        }
    }
    const auto dim = static_cast<Eigen::Index>(nodes) * block;
    op.matrix.resize(dim, dim);
    op.matrix.setFromTriplets(triplets.begin(), triplets.end());
    return op;
}

Complex inner_product(const Amplitude& f1, const Amplitude& f2, WeightKind weight, const Grid& grid) {
    if (f1.rows != f2.rows || f1.cols != f2.cols || f1.values.size() != f2.values.size())
        throw ShapeMismatch("amplitudes differ in shape");
    if (f1.nodes() != grid.active() || f1.values.size() % static_cast<std::size_t>(f1.rows * f1.cols) != 0)
        throw ShapeMismatch("amplitude does not live on this grid");
    const int block = f1.rows * f1.cols;
    Complex total = 0.0;
    for (int node = 0; node < grid.active(); ++node) {
        Complex trace = 0.0;
        for (int k = 0; k < block; ++k) {
            const auto at = static_cast<std::size_t>(node * block + k);
            trace += std::conj(f1.values[at]) * f2.values[at];
        }
        total += grid.weight(node, weight) * trace;
    }
    return total * grid.cell_volume() / static_cast<double>(block);
}

}  // namespace affine
