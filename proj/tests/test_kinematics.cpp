#include "affine/errors.hpp"
#include "affine/kinematics.hpp"
#include "support.hpp"

#include <doctest.h>

#include <numbers>

using namespace affine;
using affine::testing::Draw;
using affine::testing::max_abs;

TEST_CASE("polar factors of the identity and of a diagonal stretch") {
    const Polar id = polar_decompose(Matrix::Identity(3, 3));
    CHECK(max_abs(id.U - Matrix::Identity(3, 3)) < 1e-15);
    CHECK(max_abs(id.A - Matrix::Identity(3, 3)) < 1e-15);

    const Matrix phi{{2.0, 0.0}, {0.0, 0.5}};
    const Polar p = polar_decompose(phi);
    CHECK(max_abs(p.U - Matrix::Identity(2, 2)) < 1e-15);
    CHECK(max_abs(p.A - phi) < 1e-15);
}

TEST_CASE("polar factors of random configurations") {
    Draw draw(7);
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix phi = draw.configuration(3);
        const Polar p = polar_decompose(phi);
        CHECK(max_abs(p.U.transpose() * p.U - Matrix::Identity(3, 3)) < 1e-12);
        CHECK(p.U.determinant() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(max_abs(p.U * p.A - phi) < 1e-12 * phi.norm());
        CHECK(max_abs(p.B() * p.U - phi) < 1e-12 * phi.norm());
        CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(p.A).eigenvalues().minCoeff() > 0.0);
    }
}

TEST_CASE("two-polar factors of a diagonal stretch") {
    const TwoPolar t = two_polar(Matrix{{2.0, 0.0}, {0.0, 0.5}});
    CHECK(max_abs(t.L - Matrix::Identity(2, 2)) < 1e-15);
    CHECK(max_abs(t.R - Matrix::Identity(2, 2)) < 1e-15);
    CHECK(t.q(0) == doctest::Approx(std::log(2.0)));
    CHECK(t.q(1) == doctest::Approx(-std::log(2.0)));
}

TEST_CASE("isometry collapses to the canonical gauge") {
    const Matrix rot = affine::testing::rotation2(std::numbers::pi / 2);
    const TwoPolar t = two_polar(rot);
    CHECK(std::abs(t.q(0)) < 1e-15);
    CHECK(std::abs(t.q(1)) < 1e-15);
    CHECK(max_abs(t.R - Matrix::Identity(2, 2)) < 1e-15);
    CHECK(max_abs(t.L - rot) < 1e-15);
}

TEST_CASE("two-polar gauge and reconstruction on random draws") {
    Draw draw(11);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + trial % 2;
        const Matrix phi = draw.configuration(n);
        const TwoPolar t = two_polar(phi);
        CHECK(t.L.determinant() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(t.R.determinant() == doctest::Approx(1.0).epsilon(1e-12));
        for (int k = 1; k < n; ++k) CHECK(t.q(k - 1) >= t.q(k));
        CHECK(max_abs(t.reconstruct() - phi) < 1e-10 * phi.norm());

        // Oracle: eigenvalues of phi^T phi, ascending, against squared stretchings.
        Vector oracle = Eigen::SelfAdjointEigenSolver<Matrix>(phi.transpose() * phi).eigenvalues();
        Vector squared = (2.0 * t.q).array().exp().matrix().reverse();
        CHECK(max_abs(oracle - squared) < 1e-10 * squared.maxCoeff());
    }
}

TEST_CASE("polar and two-polar factorizations agree") {
    Draw draw(12);
    for (int trial = 0; trial < 30; ++trial) {
        const Matrix phi = draw.configuration(3);
        const Polar p = polar_decompose(phi);
        const TwoPolar t = two_polar(phi);
        CHECK(max_abs(p.U - t.L * t.R.transpose()) < 1e-10);
        CHECK(max_abs(p.A - t.R * t.stretchings().asDiagonal() * t.R.transpose()) < 1e-10 * phi.norm());
    }
}

TEST_CASE("inadmissible configurations are rejected") {
    CHECK_THROWS_AS(two_polar(Matrix{{-1.0, 0.0}, {0.0, 1.0}}), SingularConfiguration);
    CHECK_THROWS_AS(two_polar(Matrix{{1.0, 0.0}, {0.0, 1e-13}}), SingularConfiguration);
    CHECK_THROWS_AS(polar_decompose(Matrix{{1.0, NAN}, {0.0, 1.0}}), SingularConfiguration);
    CHECK_THROWS_AS(deformation(Matrix::Zero(3, 3)), SingularConfiguration);
    CHECK_NOTHROW(two_polar(Matrix{{1.0, 0.0}, {0.0, 1e-11}}));
}

TEST_CASE("deformation tensors and invariants") {
    const DeformationData id = deformation(Matrix::Identity(3, 3));
    CHECK(max_abs(id.G - Matrix::Identity(3, 3)) == 0.0);
    CHECK(max_abs(id.C - Matrix::Identity(3, 3)) == 0.0);
    for (int p = 0; p < 3; ++p) CHECK(id.invariants(p) == 3.0);

    const Vector d{{2.0, 1.0, 0.5}};
    const DeformationData diag = deformation(d.asDiagonal());
    CHECK(diag.invariants(0) == doctest::Approx(5.25).epsilon(1e-15));
    CHECK(max_abs(diag.lagrange_strain() - 0.5 * (diag.G - Matrix::Identity(3, 3))) == 0.0);
    CHECK(max_abs(diag.C * (Matrix(d.asDiagonal()) * Matrix(d.asDiagonal())) - Matrix::Identity(3, 3)) < 1e-15);
}

TEST_CASE("deformation invariants are bi-invariant under rotations") {
    Draw draw(21);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + trial % 2;
        const Matrix phi = draw.configuration(n);
        const Vector base = deformation(phi).invariants;
        const Vector moved = deformation(draw.orthogonal(n) * phi * draw.orthogonal(n)).invariants;
        CHECK(max_abs(moved - base) < 1e-10 * base.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("affine velocities") {
    Draw draw(3);
    const Matrix phi = draw.configuration(3);
    const InternalVelocity rest = affine_velocity(phi, Matrix::Zero(3, 3));
    CHECK(max_abs(rest.Omega) == 0.0);
    CHECK(max_abs(rest.OmegaHat) == 0.0);

    const Matrix phi_dot = draw.gaussian(3, 3);
    const InternalVelocity at_identity = affine_velocity(Matrix::Identity(3, 3), phi_dot);
    CHECK(max_abs(at_identity.Omega - phi_dot) < 1e-15);
    CHECK(max_abs(at_identity.OmegaHat - phi_dot) < 1e-15);

    // Isometry moving rigidly: the spatial velocity is the generating skew matrix.
    const Matrix rot = draw.orthogonal(3);
    const Matrix W = draw.skew(3);
    const InternalVelocity rigid = affine_velocity(rot, W * rot);
    CHECK(max_abs(rigid.Omega - W) < 1e-12);
    CHECK(max_abs(rigid.Omega + rigid.Omega.transpose()) < 1e-12);

    const InternalVelocity general = affine_velocity(phi, phi_dot);
    CHECK(max_abs(general.Omega * phi - phi_dot) < 1e-12);
    CHECK(max_abs(phi * general.OmegaHat - phi_dot) < 1e-12);
}

TEST_CASE("degeneracy margin") {
    CHECK(degeneracy_margin(Vector{{1.0, 0.0, -1.0}}) == 1.0);
    CHECK(degeneracy_margin(Vector{{0.3, 0.3}}) == 0.0);
    CHECK(degeneracy_margin(Vector{{std::log(2.0), 0.0, -std::log(2.0)}}) == doctest::Approx(0.6931471805599453));
}

TEST_CASE("batch decomposition matches the serial reference exactly") {
    const auto phis = random_configurations(5, 200, 0, 1e6);
    const auto parallel = two_polar_batch(phis);
    const auto serial = two_polar_batch_serial(phis);
    REQUIRE(parallel.size() == serial.size());
    for (std::size_t k = 0; k < serial.size(); ++k) {
        CHECK(parallel[k].q == serial[k].q);
        CHECK(parallel[k].L == serial[k].L);
        CHECK(parallel[k].R == serial[k].R);
    }
}

TEST_CASE("random configurations respect the condition bound") {
    for (const Matrix& phi : random_configurations(9, 100, 0, 1e6)) {
        const Vector s = Eigen::JacobiSVD<Matrix>(phi).singularValues();
        CHECK(s(0) / s(s.size() - 1) <= 1e6 * (1.0 + 1e-9));
        CHECK(phi.determinant() > 0.0);
    }
}

TEST_CASE("decomposition harness") {
    const DecompositionReport report = check_decomposition(3, 200);
    CHECK(report.passed());
    CHECK(check_decomposition(3, 200).reconstruction == report.reconstruction);
}

TEST_CASE("rotation projection") {
    Draw draw(4);
    const Matrix rot = draw.orthogonal(3);
    CHECK(max_abs(project_to_rotation(rot + 1e-6 * draw.gaussian(3, 3)) - rot) < 1e-5);
    CHECK(project_to_rotation(rot).determinant() == doctest::Approx(1.0));
}
