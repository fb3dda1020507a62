#include "affine/phase.hpp"

#include "affine/errors.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace affine {

// ---- SkewMatrix -------------------------------------------------------------

int SkewMatrix::pair_index(int n, int a, int b) { return a * n - a * (a + 1) / 2 + (b - a - 1); }

std::pair<int, int> SkewMatrix::pair_at(int n, int k) {
    for (int a = 0; a < n; ++a) {
        const int row = n - a - 1;
        if (k < row) return {a, a + 1 + k};
        k -= row;
    }
    throw DomainError("pair index out of range");
}

SkewMatrix SkewMatrix::from_dense(const Matrix& m) {
    const int n = static_cast<int>(m.rows());
    SkewMatrix out(n);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) out.set(a, b, m(a, b));
    return out;
}

SkewMatrix SkewMatrix::from_upper(int n, std::vector<double> upper) {
    if (static_cast<int>(upper.size()) != pair_count(n))
        throw DomainError("skew upper triangle has wrong length");
    SkewMatrix out(n);
    out.upper_ = std::move(upper);
    return out;
}

double SkewMatrix::operator()(int a, int b) const {
    if (a == b) return 0.0;
    if (a < b) return upper_[static_cast<std::size_t>(pair_index(n_, a, b))];
    return -upper_[static_cast<std::size_t>(pair_index(n_, b, a))];
}

void SkewMatrix::set(int a, int b, double value) {
    if (a == b) throw DomainError("diagonal of a skew matrix is fixed at zero");
    if (a < b)
        upper_[static_cast<std::size_t>(pair_index(n_, a, b))] = value;
    else
        upper_[static_cast<std::size_t>(pair_index(n_, b, a))] = -value;
}

Matrix SkewMatrix::dense() const {
    Matrix m = Matrix::Zero(n_, n_);
    for (int a = 0; a < n_; ++a)
        for (int b = a + 1; b < n_; ++b) {
            m(a, b) = (*this)(a, b);
            m(b, a) = -m(a, b);
        }
    return m;
}

SkewMatrix& SkewMatrix::operator+=(const SkewMatrix& o) {
    if (o.n_ != n_) throw DomainError("skew matrix dimension mismatch");
    for (std::size_t k = 0; k < upper_.size(); ++k) upper_[k] += o.upper_[k];
    return *this;
}

SkewMatrix& SkewMatrix::operator*=(double s) {
    for (auto& v : upper_) v *= s;
    return *this;
}

double SkewMatrix::norm_squared() const {
    double sum = 0.0;
    for (double v : upper_) sum += v * v;
    return sum;
}

// ---- ReducedState -----------------------------------------------------------

ReducedState::ReducedState(Vector q_, Vector p_, SkewMatrix M_, SkewMatrix N_)
    : q(std::move(q_)), p(std::move(p_)), M(std::move(M_)), N(std::move(N_)) {
    const int n = static_cast<int>(q.size());
    if (p.size() != n || M.n() != n || N.n() != n) throw DomainError("reduced state components disagree on n");
}

ReducedState ReducedState::from_spins(Vector q, Vector p, const SkewMatrix& rho, const SkewMatrix& tau) {
    return ReducedState(std::move(q), std::move(p), -1.0 * (rho + tau), rho - tau);
}

Vector ReducedState::flatten() const {
    const int n = this->n();
    const int k = SkewMatrix::pair_count(n);
    Vector x(dimension());
    x.head(n) = q;
    x.segment(n, n) = p;
    for (int i = 0; i < k; ++i) {
        x(2 * n + i) = M.upper()[static_cast<std::size_t>(i)];
        x(2 * n + k + i) = N.upper()[static_cast<std::size_t>(i)];
    }
    return x;
}

ReducedState ReducedState::unflatten(int n, const Vector& x) {
    const int k = SkewMatrix::pair_count(n);
    if (x.size() != 2 * n + 2 * k) throw DomainError("flat state has wrong length");
    ReducedState s(n);
    s.q = x.head(n);
    s.p = x.segment(n, n);
    for (int i = 0; i < k; ++i) {
        s.M.upper()[static_cast<std::size_t>(i)] = x(2 * n + i);
        s.N.upper()[static_cast<std::size_t>(i)] = x(2 * n + k + i);
    }
    return s;
}

Vector StateGradient::flatten() const {
    const auto n = dq.size();
    const auto k = static_cast<Eigen::Index>(dM.upper().size());
    Vector x(2 * n + 2 * k);
    x.head(n) = dq;
    x.segment(n, n) = dp;
    for (Eigen::Index i = 0; i < k; ++i) {
        x(2 * n + i) = dM.upper()[static_cast<std::size_t>(i)];
        x(2 * n + k + i) = dN.upper()[static_cast<std::size_t>(i)];
    }
    return x;
}

// ---- ModelSpec --------------------------------------------------------------

namespace {

constexpr std::array<std::pair<ModelKind, std::string_view>, 6> kModelNames{{
    {ModelKind::DAlembert, "DAlembert"},
    {ModelKind::AffAff, "AffAff"},
    {ModelKind::AffMetr, "AffMetr"},
    {ModelKind::MetrAff, "MetrAff"},
    {ModelKind::MetrMetr, "MetrMetr"},
    {ModelKind::TrigUn, "TrigUn"},
}};

void require_usable(double v, const char* what) {
    if (!std::isfinite(v) || v == 0.0) throw DomainError(std::string("model constant unusable: ") + what);
}

}  // namespace

std::string_view to_string(ModelKind kind) {
    for (const auto& [k, name] : kModelNames)
        if (k == kind) return name;
    return "?";
}

ModelKind model_kind_from_string(std::string_view name) {
    for (const auto& [k, n] : kModelNames)
        if (n == name) return k;
    throw DomainError("unknown model kind: " + std::string(name));
}

void ModelSpec::validate(int n) const {
    for (double v : {m, I, A, B, I1, I2, a, b, c, d, hbar})
        if (!std::isfinite(v)) throw DomainError("model constants must be finite");
    require_usable(hbar, "hbar");
    switch (kind) {
        case ModelKind::DAlembert:
            require_usable(I, "I");
            break;
        case ModelKind::AffAff:
        case ModelKind::TrigUn:
            require_usable(A, "A");
            require_usable(A + n * B, "A + nB");
            break;
        case ModelKind::AffMetr:
        case ModelKind::MetrAff:
            require_usable(I, "I");
            require_usable(I + A, "I + A");
            require_usable(I + A + n * B, "I + A + nB");
            require_usable(I * I - A * A, "I^2 - A^2");
            break;
        case ModelKind::MetrMetr:
            require_usable(a, "a");
            require_usable(b, "b");
            require_usable(c, "c");
            require_usable(d, "d");
            break;
    }
}

double ModelSpec::shear_inertia() const {
    switch (kind) {
        case ModelKind::AffAff:
        case ModelKind::TrigUn: return A;
        case ModelKind::AffMetr:
        case ModelKind::MetrAff: return I + A;
        case ModelKind::MetrMetr: return a;
        case ModelKind::DAlembert: return I;
    }
    return A;
}

double ModelSpec::dilatation_inertia(int n) const {
    switch (kind) {
        case ModelKind::AffAff:
        case ModelKind::TrigUn: return n * (A + n * B);
        case ModelKind::AffMetr:
        case ModelKind::MetrAff: return n * (I + A + n * B);
        case ModelKind::MetrMetr: return b;
        case ModelKind::DAlembert: break;
    }
    throw DomainError("d'Alembert model has no separated dilatational mode");
}

double ModelSpec::spin_coefficient() const {
    if (kind == ModelKind::MetrAff) return I / (2.0 * (I * I - A * A));
    if (kind == ModelKind::MetrMetr) return 1.0 / (2.0 * c);
    return 0.0;
}

double ModelSpec::vorticity_coefficient() const {
    if (kind == ModelKind::AffMetr) return I / (2.0 * (I * I - A * A));
    if (kind == ModelKind::MetrMetr) return 1.0 / (2.0 * d);
    return 0.0;
}

double ModelSpec::alpha() const { return kind == ModelKind::AffAff || kind == ModelKind::TrigUn ? A : I + A; }

double ModelSpec::beta(int n) const {
    require_usable(B, "B (beta has a 1/B pole)");
    const double al = alpha();
    return -al * (al + n * B) / B;
}

double ModelSpec::mu() const {
    require_usable(I, "I");
    return (I * I - A * A) / I;
}

// ---- PotentialSpec ----------------------------------------------------------

std::string_view to_string(DilatationalKind kind) {
    switch (kind) {
        case DilatationalKind::None: return "None";
        case DilatationalKind::HarmonicWell: return "HarmonicWell";
        case DilatationalKind::Box: return "Box";
        case DilatationalKind::SteepOscillator: return "SteepOscillator";
    }
    return "?";
}

std::string_view to_string(PairwiseKind kind) { return kind == PairwiseKind::Harmonic ? "Harmonic" : "None"; }

double PotentialSpec::dilatational(double qbar) const {
    switch (kind) {
        case DilatationalKind::None: return 0.0;
        case DilatationalKind::HarmonicWell: return 0.5 * k * qbar * qbar;
        case DilatationalKind::Box:
            return std::abs(qbar) <= 0.5 * width ? 0.0 : std::numeric_limits<double>::infinity();
        case DilatationalKind::SteepOscillator: return k / exponent * std::pow(std::abs(qbar), exponent);
    }
    return 0.0;
}

double PotentialSpec::dilatational_derivative(double qbar) const {
    switch (kind) {
        case DilatationalKind::None:
        case DilatationalKind::Box: return 0.0;
        case DilatationalKind::HarmonicWell: return k * qbar;
        case DilatationalKind::SteepOscillator:
            return k * std::pow(std::abs(qbar), exponent - 1.0) * (qbar < 0.0 ? -1.0 : 1.0);
    }
    return 0.0;
}

double PotentialSpec::pair(double x) const {
    return pairwise == PairwiseKind::Harmonic ? 0.5 * pair_k * x * x : 0.0;
}

double PotentialSpec::pair_derivative(double x) const {
    return pairwise == PairwiseKind::Harmonic ? pair_k * x : 0.0;
}

double PotentialSpec::value(const Vector& q) const {
    double v = dilatational(q.mean());
    if (pairwise != PairwiseKind::None)
        for (Eigen::Index i = 0; i < q.size(); ++i)
            for (Eigen::Index j = 0; j < q.size(); ++j)
                if (i != j) v += 0.5 * pair(q(i) - q(j));
    return v;
}

Vector PotentialSpec::gradient(const Vector& q) const {
    const auto n = q.size();
    Vector g = Vector::Constant(n, dilatational_derivative(q.mean()) / static_cast<double>(n));
    if (pairwise != PairwiseKind::None)
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                if (i != j) {
                    // f(q_i - q_j) and f(q_j - q_i) both carry weight 1/2.
                    g(i) += 0.5 * pair_derivative(q(i) - q(j));
                    g(i) -= 0.5 * pair_derivative(q(j) - q(i));
                }
    return g;
}

double wrap_angle(double x) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(x + std::numbers::pi, two_pi);
    if (r <= 0.0) r += two_pi;
    return r - std::numbers::pi;
}

}  // namespace affine
