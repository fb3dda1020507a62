#include "affine/errors.hpp"
#include "affine/quantum.hpp"

#include <cmath>
#include <cstdlib>

namespace affine {

namespace {

constexpr int kMaxTwiceLabel = 8;  // s, j <= 4 for the n = 3 reduced problems

double casimir_value(int n, int twice_label, double hbar) {
    const double label = 0.5 * twice_label;
    return n == 2 ? hbar * hbar * label * label : hbar * hbar * label * (label + 1.0);
}

}  // namespace

ComplexMatrix SpinBlock::casimir() const { return S[0] * S[0] + S[1] * S[1] + S[2] * S[2]; }

SpinBlock spin_matrices(int twice_s, double hbar) {
    if (twice_s < 0) throw InvalidLabel("spin label must satisfy 2s >= 0");
    const int dim = twice_s + 1;
    const double s = 0.5 * twice_s;
    // Basis ordered m = -s, ..., s so that S3 = hbar diag(-s, ..., s).
    ComplexMatrix raise = ComplexMatrix::Zero(dim, dim);
    ComplexMatrix s3 = ComplexMatrix::Zero(dim, dim);
    for (int row = 0; row < dim; ++row) {
        const double m = row - s;
        s3(row, row) = hbar * m;
        if (row + 1 < dim) raise(row + 1, row) = hbar * std::sqrt(s * (s + 1.0) - m * (m + 1.0));
    }
    const ComplexMatrix lower = raise.adjoint();
    SpinBlock out;
    out.twice_label = twice_s;
    out.hbar = hbar;
    out.S[0] = 0.5 * (raise + lower);
    out.S[1] = Complex(0.0, -0.5) * (raise - lower);
    out.S[2] = s3;
    return out;
}

SpinBlock fourier_generator(int k, double hbar) {
    SpinBlock out;
    out.twice_label = 2 * k;
    out.hbar = hbar;
    out.S[0] = ComplexMatrix::Zero(1, 1);
    out.S[1] = ComplexMatrix::Zero(1, 1);
    out.S[2] = ComplexMatrix::Constant(1, 1, Complex(hbar * k, 0.0));
    return out;
}

double haar_weight(const Vector& q) {
    double out = 1.0;
    for (Eigen::Index i = 0; i < q.size(); ++i)
        for (Eigen::Index j = 0; j < q.size(); ++j)
            if (i != j) out *= std::abs(std::sinh(q(i) - q(j)));
    return out;
}

double lebesgue_weight(const Vector& Q) {
    double out = 1.0;
    for (Eigen::Index i = 0; i < Q.size(); ++i)
        for (Eigen::Index j = 0; j < Q.size(); ++j)
            if (i != j) out *= std::abs(Q(i) * Q(i) - Q(j) * Q(j));
    return out;
}

double circular_weight(const Vector& q) {
    double out = 1.0;
    for (Eigen::Index i = 0; i < q.size(); ++i)
        for (Eigen::Index j = 0; j < q.size(); ++j)
            if (i != j) out *= std::abs(std::sin(q(i) - q(j)));
    return out;
}

// sqrt of each weight is |prod_{a<b} g_ab|; with l = ln sqrt(weight),
// (Laplacian sqrt w)/sqrt w = sum_a (d_a^2 l + (d_a l)^2).
double haar_amended_ratio(const Vector& q) {
    double out = 0.0;
    for (Eigen::Index a = 0; a < q.size(); ++a) {
        double first = 0.0;
        double second = 0.0;
        for (Eigen::Index b = 0; b < q.size(); ++b) {
            if (a == b) continue;
            const double t = std::tanh(q(a) - q(b));
            const double s = std::sinh(q(a) - q(b));
            first += 1.0 / t;
            second -= 1.0 / (s * s);
        }
        out += second + first * first;
    }
    return out;
}

double circular_amended_ratio(const Vector& q) {
    double out = 0.0;
    for (Eigen::Index a = 0; a < q.size(); ++a) {
        double first = 0.0;
        double second = 0.0;
        for (Eigen::Index b = 0; b < q.size(); ++b) {
            if (a == b) continue;
            const double s = std::sin(q(a) - q(b));
            first += std::cos(q(a) - q(b)) / s;
            second -= 1.0 / (s * s);
        }
        out += second + first * first;
    }
    return out;
}

double lebesgue_amended_ratio(const Vector& Q) {
    double out = 0.0;
    for (Eigen::Index a = 0; a < Q.size(); ++a) {
        double first = 0.0;
        double second = 0.0;
        for (Eigen::Index b = 0; b < Q.size(); ++b) {
            if (a == b) continue;
            const double qa2 = Q(a) * Q(a);
            const double qb2 = Q(b) * Q(b);
            const double gap = qa2 - qb2;
            first += 2.0 * Q(a) / gap;
            second -= 2.0 * (qa2 + qb2) / (gap * gap);
        }
        out += second + first * first;
    }
    return out;
}

void validate_labels(int n, int twice_alpha, int twice_beta, bool covering) {
    if (n != 2 && n != 3) throw DomainError("spectral problems support n = 2 and n = 3 only");
    if (n == 3) {
        if (twice_alpha < 0 || twice_beta < 0) throw InvalidLabel("spin labels must be non-negative");
        if (twice_alpha > kMaxTwiceLabel || twice_beta > kMaxTwiceLabel)
            throw InvalidLabel("spin labels are limited to s, j <= 4");
    }
    const bool alpha_half = std::abs(twice_alpha) % 2 == 1;
    const bool beta_half = std::abs(twice_beta) % 2 == 1;
    if (!covering && (alpha_half || beta_half))
        throw InvalidLabel("half-integer labels need covering mode");
    if (alpha_half != beta_half) throw InvalidLabel("labels must differ by an integer");
}

double angular_shift(const ModelSpec& model, int twice_alpha, int twice_beta, int n) {
    validate_labels(n, twice_alpha, twice_beta, true);
    double out = 0.0;
    const double spin = model.spin_coefficient();
    const double vorticity = model.vorticity_coefficient();
    if (spin != 0.0) out += spin * casimir_value(n, twice_alpha, model.hbar);
    if (vorticity != 0.0) out += vorticity * casimir_value(n, twice_beta, model.hbar);
    return out;
}

Matrix angular_casimir_left(int n, int twice_alpha, double hbar) {
    if (n == 2) return Matrix::Constant(1, 1, casimir_value(2, twice_alpha, hbar));
    const SpinBlock block = spin_matrices(twice_alpha, hbar);
    // vec(C f) for a single column block; callers kron with the identity of the other side.
    return block.casimir().real();
}

Matrix angular_casimir_right(int n, int twice_beta, double hbar) {
    if (n == 2) return Matrix::Constant(1, 1, casimir_value(2, twice_beta, hbar));
    const SpinBlock block = spin_matrices(twice_beta, hbar);
    return block.casimir().transpose().real();
}

}  // namespace affine
