#pragma once

#include "affine/kinematics.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace affine {

// Skew-symmetric n x n matrix stored by its strict upper triangle, row-major:
// (0,1), (0,2), ..., (0,n-1), (1,2), ...
class SkewMatrix {
public:
    SkewMatrix() = default;
    explicit SkewMatrix(int n) : n_(n), upper_(static_cast<std::size_t>(pair_count(n)), 0.0) {}

    static int pair_count(int n) { return n * (n - 1) / 2; }
    static int pair_index(int n, int a, int b);  // requires a < b
    static std::pair<int, int> pair_at(int n, int k);
    static SkewMatrix from_dense(const Matrix& m);  // takes the upper triangle
    static SkewMatrix from_upper(int n, std::vector<double> upper);

    int n() const { return n_; }
    double operator()(int a, int b) const;
    void set(int a, int b, double value);
    Matrix dense() const;

    const std::vector<double>& upper() const { return upper_; }
    std::vector<double>& upper() { return upper_; }

    SkewMatrix& operator+=(const SkewMatrix& o);
    SkewMatrix& operator*=(double s);
    friend SkewMatrix operator+(SkewMatrix a, const SkewMatrix& b) { return a += b; }
    friend SkewMatrix operator-(SkewMatrix a, const SkewMatrix& b) { return a += b * -1.0; }
    friend SkewMatrix operator*(SkewMatrix a, double s) { return a *= s; }
    friend SkewMatrix operator*(double s, SkewMatrix a) { return a *= s; }

    // -1/2 Tr(X^2) = sum over a<b of X_ab^2.
    double norm_squared() const;

private:
    int n_ = 0;
    std::vector<double> upper_;
};

struct ReducedState {
    Vector q;
    Vector p;
    SkewMatrix M;
    SkewMatrix N;

    ReducedState() = default;
    explicit ReducedState(int n) : q(Vector::Zero(n)), p(Vector::Zero(n)), M(n), N(n) {}
    ReducedState(Vector q_, Vector p_, SkewMatrix M_, SkewMatrix N_);

    int n() const { return static_cast<int>(q.size()); }

    // L- and R-gyroscope spins in co-moving axes.
    SkewMatrix rho() const { return 0.5 * (N - M); }
    SkewMatrix tau() const { return -0.5 * (M + N); }
    static ReducedState from_spins(Vector q, Vector p, const SkewMatrix& rho, const SkewMatrix& tau);

    // Flat coordinates: q, p, M (upper), N (upper).
    int dimension() const { return 2 * n() + 2 * SkewMatrix::pair_count(n()); }
    Vector flatten() const;
    static ReducedState unflatten(int n, const Vector& x);
};

enum class ModelKind { DAlembert, AffAff, AffMetr, MetrAff, MetrMetr, TrigUn };

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);

struct ModelSpec {
    ModelKind kind = ModelKind::AffAff;
    double m = 1.0;
    double I = 0.0;
    double A = 1.0;
    double B = 0.0;
    double I1 = 0.0;
    double I2 = 0.0;
    double a = 1.0;
    double b = 1.0;
    double c = 1.0;
    double d = 1.0;
    double hbar = 1.0;

    // Throws DomainError when a denominator used by this kind is zero or non-finite.
    void validate(int n) const;

    // Coefficient of the SL(n) Casimir is 1/(2 * shear_inertia()).
    double shear_inertia() const;
    // Mass of the dilatational mode: kinetic term p_total^2 / (2 * dilatation_inertia(n)).
    double dilatation_inertia(int n) const;
    // Coefficients of ||S||^2 and ||V||^2 in the Hamiltonian.
    double spin_coefficient() const;
    double vorticity_coefficient() const;

    double alpha() const;          // I + A
    double beta(int n) const;      // -(I+A)(I+A+nB)/B, requires B != 0
    double mu() const;             // (I^2 - A^2)/I
};

enum class DilatationalKind { None, HarmonicWell, Box, SteepOscillator };
enum class PairwiseKind { None, Harmonic };

std::string_view to_string(DilatationalKind kind);
std::string_view to_string(PairwiseKind kind);

// V(q) = V(qbar) + 1/2 sum_{i != j} f(q_i - q_j); depends on q only.
struct PotentialSpec {
    DilatationalKind kind = DilatationalKind::None;
    double k = 0.0;
    double width = 0.0;
    double exponent = 4.0;
    PairwiseKind pairwise = PairwiseKind::None;
    double pair_k = 0.0;

    double dilatational(double qbar) const;
    double dilatational_derivative(double qbar) const;
    double pair(double x) const;
    double pair_derivative(double x) const;

    double value(const Vector& q) const;
    Vector gradient(const Vector& q) const;
    bool is_zero() const { return kind == DilatationalKind::None && pairwise == PairwiseKind::None; }
};

struct StateGradient {
    Vector dq;
    Vector dp;
    SkewMatrix dM;  // derivative with respect to the independent upper entries
    SkewMatrix dN;

    Vector flatten() const;
};

double kinetic_energy(const ModelSpec& model, const ReducedState& state);
double hamiltonian(const ModelSpec& model, const PotentialSpec& potential, const ReducedState& state);
StateGradient hamiltonian_gradient(const ModelSpec& model, const PotentialSpec& potential,
                                   const ReducedState& state);

// Lattice form with separate 1/(2 alpha) and 1/(2 beta) terms; AffAff only, B != 0.
double affaff_hamiltonian_lattice_form(const ModelSpec& model, const PotentialSpec& potential,
                                       const ReducedState& state);

double casimir_csl2(const ReducedState& state);

// Map q into (-pi, pi].
double wrap_angle(double x);

// Velocity-side description of an internal motion in two-polar variables.
struct PolarVelocity {
    Vector qdot;
    SkewMatrix chi;    // L^T dL/dt
    SkewMatrix theta;  // R^T dR/dt
};

struct DalembertMomenta {
    Vector P;
    Matrix rho;
    Matrix tau;
};

struct DalembertVelocities {
    Vector Qdot;
    Matrix chi;
    Matrix theta;
};

DalembertMomenta legendre_dalembert(const Vector& D, const Vector& Qdot, const Matrix& chi,
                                    const Matrix& theta, double I);
DalembertVelocities inverse_legendre_dalembert(const Vector& D, const Vector& P, const Matrix& rho,
                                               const Matrix& tau, double I);

// Legendre map for every kind with a velocity form (all but MetrMetr and TrigUn).
ReducedState legendre(const ModelSpec& model, const Vector& q, const PolarVelocity& v);
PolarVelocity inverse_legendre(const ModelSpec& model, const ReducedState& state);

}  // namespace affine
