#include <doctest.h>

#include <random>

#include "support/oracles.hpp"
#include "support/properties.hpp"
#include "tdc/errors.hpp"
#include "tdc/linalg.hpp"

using namespace tdc;
using namespace tdc::testing;

TEST_CASE("pinv of a known rank-one matrix") {
    // (1 2; 2 4) = v v^T with v = (1, 2): pinv = v v^T / |v|^4
    const Mat a = make_mat({{1, 2}, {2, 4}});
    const Mat want = a / 25.0;
    CHECK((pinv(a) - want).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(rank(a) == 1);
}

TEST_CASE("pinv of a tall full-rank matrix is a left inverse") {
    const Mat a = make_mat({{1, 0}, {0, 1}, {1, 1}});
    const Mat p = pinv(a);
    CHECK((p * a - Mat::Identity(2, 2)).norm() < 1e-14);
    // normal equations oracle
    const Mat ne = (a.transpose() * a).inverse() * a.transpose();
    CHECK((p - ne).norm() < 1e-14);
}

TEST_CASE("Penrose conditions over random rank-deficient matrices") {
    std::mt19937_64 rng(11);
    const SuiteResult r = penrose_suite(rng, 100, 1e-9);
    CHECK(r.trials == 100);
    CHECK(r.worst <= 1e-9);
}

TEST_CASE("rank follows the construction") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 50; ++t) {
        const Index k = 1 + t % 4;
        CHECK(rank(random_rank(rng, 5, 6, k)) == k);
    }
    CHECK(rank(Mat::Zero(3, 3)) == 0);
    CHECK(rank(make_mat({{1, 0}, {0, 1e-13}})) == 1);
}

TEST_CASE("eigenvalue residuals") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 50; ++t) {
        const Index n = 1 + t % 6;
        const Mat a = random_mat(rng, n, n);
        const Spectrum s = eig(a);
        REQUIRE(static_cast<Index>(s.eigenvalues.size()) == n);
        for (const Complex& l : s.eigenvalues) {
            const Eigen::MatrixXcd shifted = a.cast<Complex>() - l * Eigen::MatrixXcd::Identity(n, n);
            const double smin = Eigen::JacobiSVD<Eigen::MatrixXcd>(shifted).singularValues()(n - 1);
            CHECK(smin <= 1e-9 * (1.0 + a.norm()));
        }
    }
}

TEST_CASE("2x2 spectrum matches the characteristic polynomial") {
    const Mat a = make_mat({{0.1, 1}, {1, -2}});
    const std::vector<double> want = real_eig2(a);
    const Spectrum s = eig(a);
    CHECK(s.min_real == doctest::Approx(want[0]).epsilon(1e-14));
    CHECK(s.max_real() == doctest::Approx(want[1]).epsilon(1e-14));
}

TEST_CASE("symmetric eigenvalue bounds reject asymmetric input") {
    const Mat s = make_mat({{2, 1}, {1, 2}});
    CHECK(min_eig_sym(s) == doctest::Approx(1.0));
    CHECK(max_eig_sym(s) == doctest::Approx(3.0));
    CHECK_THROWS_AS(min_eig_sym(make_mat({{1, 2}, {0, 1}})), Error);
}

TEST_CASE("solve reports singular systems with a condition estimate") {
    const Mat a = make_mat({{1, 2}, {2, 4}});
    try {
        solve(a, Mat::Identity(2, 2));
        FAIL("expected SingularMatrixError");
    } catch (const SingularMatrixError& e) {
        CHECK(e.kind() == ErrorKind::Singular);
        CHECK(e.condition() > 1e12);
    }
    const Mat b = make_mat({{2, 1}, {1, 3}});
    CHECK((b * solve(b, Mat::Identity(2, 2)) - Mat::Identity(2, 2)).norm() < 1e-14);
}

TEST_CASE("left null space is orthonormal and annihilates") {
    std::mt19937_64 rng(8);
    const Mat a = random_rank(rng, 6, 3, 2);
    const Mat z = left_null_space(a);
    CHECK(z.rows() == 4);
    CHECK((z * a).norm() < 1e-12);
    CHECK((z * z.transpose() - Mat::Identity(4, 4)).norm() < 1e-12);
}

TEST_CASE("stacking helpers") {
    const Mat a = make_mat({{1, 2}});
    const Mat b = make_mat({{3, 4}});
    CHECK(vstack({a, b}) == make_mat({{1, 2}, {3, 4}}));
    CHECK(hstack({a, b}) == make_mat({{1, 2, 3, 4}}));
    CHECK(block_diag({a, b}) == make_mat({{1, 2, 0, 0}, {0, 0, 3, 4}}));
    CHECK(max_abs(make_mat({{-7, 2}})) == 7.0);
    Mat bad = a;
    bad(0, 0) = std::nan("");
    CHECK_FALSE(all_finite(bad));
}
