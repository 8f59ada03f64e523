#include "kcca/error.hpp"
#include "kcca/linalg.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace kcca;
using namespace kcca::linalg;

TEST_CASE("reg_solve examples") {
    SUBCASE("identity without regularization") {
        const Eigen::Vector3d b(1, -2, 3);
        CHECK((reg_solve(Eigen::Matrix3d::Identity(), RegParam{0.0, false}, b) - b).norm() == 0.0);
    }
    SUBCASE("diag(1,0) with eps = 1") {
        Eigen::Matrix2d a = Eigen::Vector2d(1, 0).asDiagonal();
        const Eigen::VectorXd x = reg_solve(a, RegParam{1.0, false}, Eigen::Vector2d(1, 1));
        CHECK(x(0) == doctest::Approx(0.5));
        CHECK(x(1) == doctest::Approx(1.0));
    }
    SUBCASE("random PSD residual") {
        auto& g = test::rng(21);
        const Eigen::MatrixXd a = test::random_psd(20, 20, g);
        const Eigen::MatrixXd b = test::gaussian_matrix(20, 3, g);
        const Eigen::MatrixXd x = reg_solve(a, RegParam{1e-6, false}, b);
        const Eigen::MatrixXd shifted = a + 1e-6 * Eigen::MatrixXd::Identity(20, 20);
        CHECK((shifted * x - b).norm() <= 1e-8 * b.norm());
    }
    SUBCASE("scale_by_n uses n * eps") {
        const Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 4);
        const Eigen::VectorXd x = reg_solve(a, RegParam{0.5, true}, Eigen::VectorXd::Ones(4));
        CHECK((x - Eigen::VectorXd::Constant(4, 0.5)).norm() < 1e-15);
    }
    SUBCASE("indefinite input names the matrix") {
        Eigen::Matrix2d a;
        a << 1, 0, 0, -5;
        try {
            reg_solve(a, RegParam{0.0, false}, Eigen::Vector2d(1, 1), "G_XX");
            FAIL("expected a numerical error");
        } catch (const NumericalError& e) {
            CHECK(std::string(e.cause()).find("G_XX") != std::string::npos);
        }
    }
}

TEST_CASE("eig_nonsymmetric examples") {
    SUBCASE("diagonal") {
        const auto r = eig_nonsymmetric(Eigen::Vector3d(3, 1, 2).asDiagonal().toDenseMatrix());
        CHECK(r.values(0) == doctest::Approx(3));
        CHECK(r.values(1) == doctest::Approx(2));
        CHECK(r.values(2) == doctest::Approx(1));
        CHECK(r.complex_count == 0);
    }
    SUBCASE("zero matrix") {
        const auto r = eig_nonsymmetric(Eigen::MatrixXd::Zero(4, 4));
        CHECK(r.values.cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("PSD product has real spectrum in [0, 1)") {
        auto& g = test::rng(22);
        for (int rep = 0; rep < 20; ++rep) {
            const Eigen::Index n = 10 + rep;
            const Eigen::MatrixXd gm = test::random_psd(n, n / 2 + 1, g);
            const Eigen::MatrixXd h = test::random_psd(n, n, g);
            const double c = n * 1e-3;
            const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
            const Eigen::MatrixXd m = gm * (gm + c * id).inverse() * (h + c * id).inverse() * h;
            const auto r = eig_nonsymmetric(m);
            const auto ref = test::reference_spectrum(m);
            CHECK(r.complex_count == 0);
            for (Eigen::Index j = 0; j < n; ++j) {
                CHECK(r.values(j) == doctest::Approx(ref[static_cast<std::size_t>(j)].real()).epsilon(1e-8).scale(1.0));
                CHECK(r.values(j) > -1e-10);
                CHECK(r.values(j) < 1.0);
            }
        }
    }
    SUBCASE("contract: sorted, unit norm, sign fixed, small residual") {
        auto& g = test::rng(23);
        const Eigen::MatrixXd m = test::gaussian_matrix(12, 12, g);
        const auto r = eig_nonsymmetric(m);
        for (Eigen::Index j = 0; j + 1 < r.values.size(); ++j)
            CHECK(r.values(j) >= r.values(j + 1));
        for (Eigen::Index j = 0; j < r.values.size(); ++j) {
            CHECK(r.vectors.col(j).norm() == doctest::Approx(1.0));
            Eigen::Index imax = 0;
            r.vectors.col(j).cwiseAbs().maxCoeff(&imax);
            CHECK(r.vectors(imax, j) > 0.0);
        }
        CHECK(r.complex_count > 0);
        // Real eigenpairs satisfy the residual bound.
        const double norm2 = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
        for (Eigen::Index j = 0; j < r.values.size(); ++j)
            if (r.imag(j) == 0.0)
                CHECK((m * r.vectors.col(j) - r.values(j) * r.vectors.col(j)).norm() <=
                      1e-6 * norm2);
    }
    SUBCASE("rotation is flagged as complex") {
        Eigen::Matrix2d rot;
        rot << 0, -1, 1, 0;
        const auto r = eig_nonsymmetric(rot);
        CHECK(r.complex_count == 2);
        CHECK(std::abs(r.imag(0)) == doctest::Approx(1.0));
    }
}

TEST_CASE("eig_symmetric sorts descending") {
    Eigen::Matrix3d m;
    m << 2, 1, 0, 1, 2, 0, 0, 0, 5;
    const auto r = eig_symmetric(m);
    CHECK(r.values(0) == doctest::Approx(5));
    CHECK(r.values(1) == doctest::Approx(3));
    CHECK(r.values(2) == doctest::Approx(1));
}

TEST_CASE("generalized_eig examples") {
    SUBCASE("A = B = I") {
        const auto r = generalized_eig(Eigen::MatrixXd::Identity(4, 4), Eigen::MatrixXd::Identity(4, 4));
        CHECK((r.values.array() - 1.0).abs().maxCoeff() < 1e-14);
    }
    SUBCASE("A = diag(2, 1), B = I") {
        const auto r = generalized_eig(Eigen::Vector2d(2, 1).asDiagonal().toDenseMatrix(),
                                       Eigen::MatrixXd::Identity(2, 2));
        CHECK(r.values(0) == doctest::Approx(2));
        CHECK(r.values(1) == doctest::Approx(1));
    }
    SUBCASE("CCA block system has a spectrum symmetric about zero") {
        auto& g = test::rng(24);
        const Eigen::Index n = 12;
        const Eigen::MatrixXd gx = test::random_psd(n, n, g);
        const Eigen::MatrixXd gy = test::random_psd(n, 5, g);
        const double c = n * 1e-2;
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 2 * n), b = a;
        a.topRightCorner(n, n) = gy;
        a.bottomLeftCorner(n, n) = gx;
        b.topLeftCorner(n, n) = gx + c * Eigen::MatrixXd::Identity(n, n);
        b.bottomRightCorner(n, n) = gy + c * Eigen::MatrixXd::Identity(n, n);
        const auto r = generalized_eig(a, b);
        // rank(G_YY) = 5 leaves a defective zero eigenvalue (2 x 2 Jordan
        // blocks), which floating point resolves only to about sqrt(machine eps).
        auto tol = [](double ref) { return std::abs(ref) > 1e-4 ? 1e-8 : 1e-5; };
        for (Eigen::Index j = 0; j < 2 * n; ++j)
            CHECK(std::abs(r.values(j) + r.values(2 * n - 1 - j)) <= tol(r.values(j)));
        // Oracle: B^{-1} A through a dense LU.
        const auto ref = test::reference_spectrum(b.fullPivLu().solve(a));
        for (Eigen::Index j = 0; j < 2 * n; ++j) {
            const double rj = ref[static_cast<std::size_t>(j)].real();
            CHECK(std::abs(r.values(j) - rj) <= tol(rj));
        }
        const double scale = Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues()(0) +
                             Eigen::JacobiSVD<Eigen::MatrixXd>(b).singularValues()(0);
        for (Eigen::Index j = 0; j < 2 * n; ++j)
            if (std::abs(r.values(j)) > 1e-4)
                CHECK((a * r.vectors.col(j) - r.values(j) * b * r.vectors.col(j)).norm() <= 1e-6 * scale);
    }
    SUBCASE("indefinite B is rejected") {
        Eigen::Matrix2d b;
        b << 1, 0, 0, -1;
        CHECK_THROWS_AS(generalized_eig(Eigen::MatrixXd::Identity(2, 2), b), NumericalError);
    }
}

TEST_CASE("inv_sqrt_psd examples") {
    SUBCASE("diag(4, 9)") {
        const Eigen::MatrixXd r =
            inv_sqrt_psd(Eigen::Vector2d(4, 9).asDiagonal().toDenseMatrix(), RegParam{0.0, false});
        CHECK(r(0, 0) == doctest::Approx(0.5));
        CHECK(r(1, 1) == doctest::Approx(1.0 / 3));
        CHECK(std::abs(r(0, 1)) < 1e-15);
    }
    SUBCASE("zero matrix with eps = 1") {
        const Eigen::MatrixXd r = inv_sqrt_psd(Eigen::MatrixXd::Zero(2, 2), RegParam{1.0, false});
        CHECK((r - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-15);
    }
    SUBCASE("random PSD whitening") {
        auto& g = test::rng(25);
        const Eigen::MatrixXd a = test::random_psd(15, 6, g);
        const Eigen::MatrixXd ae = a + 1e-3 * Eigen::MatrixXd::Identity(15, 15);
        const Eigen::MatrixXd r = inv_sqrt_psd(a, RegParam{1e-3, false});
        CHECK((r - r.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        const Eigen::MatrixXd w = r * ae * r - Eigen::MatrixXd::Identity(15, 15);
        CHECK(Eigen::JacobiSVD<Eigen::MatrixXd>(w).singularValues()(0) <= 1e-8);
    }
    SUBCASE("negative eigenvalue is rejected") {
        Eigen::Matrix2d a;
        a << 1, 0, 0, -0.5;
        CHECK_THROWS_AS(inv_sqrt_psd(a, RegParam{0.0, false}), NumericalError);
    }
}

TEST_CASE("svd_trunc examples") {
    SUBCASE("identity") {
        const auto s = svd_trunc(Eigen::MatrixXd::Identity(3, 3), 3);
        CHECK((s.sigma.array() - 1.0).abs().maxCoeff() < 1e-15);
    }
    SUBCASE("diag(3, 1), k = 1") {
        const auto s = svd_trunc(Eigen::Vector2d(3, 1).asDiagonal().toDenseMatrix(), 1);
        REQUIRE(s.sigma.size() == 1);
        CHECK(s.sigma(0) == doctest::Approx(3));
    }
    SUBCASE("Eckart-Young on a random 10 x 6 matrix") {
        auto& g = test::rng(26);
        const Eigen::MatrixXd m = test::gaussian_matrix(10, 6, g);
        const Eigen::VectorXd full = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
        for (Eigen::Index k = 1; k < 6; ++k) {
            const auto s = svd_trunc(m, k);
            const Eigen::MatrixXd approx = s.u * s.sigma.asDiagonal() * s.v.transpose();
            const double err = Eigen::JacobiSVD<Eigen::MatrixXd>(m - approx).singularValues()(0);
            CHECK(err == doctest::Approx(full(k)).epsilon(1e-6));
            CHECK((s.u.transpose() * s.u - Eigen::MatrixXd::Identity(k, k)).norm() < 1e-8);
            CHECK((s.v.transpose() * s.v - Eigen::MatrixXd::Identity(k, k)).norm() < 1e-8);
        }
    }
    SUBCASE("k beyond min dimension is rejected") {
        CHECK_THROWS_AS(svd_trunc(Eigen::MatrixXd::Identity(3, 2), 3), InputError);
    }
}

TEST_CASE("spectrum of G (G + n eps I)^{-1} lies in [0, 1)") {
    auto& g = test::rng(27);
    for (int rep = 0; rep < 30; ++rep) {
        const Eigen::Index n = 5 + rep;
        const Eigen::MatrixXd gm = test::random_psd(n, 1 + rep % n, g);
        const double c = n * std::pow(10.0, -1 - rep % 7);
        const auto r = eig_symmetric(
            gm * (gm + c * Eigen::MatrixXd::Identity(n, n)).inverse());
        CHECK(r.values.maxCoeff() < 1.0);
        // Forming the inverse costs about eps * |G| / c in absolute accuracy.
        CHECK(r.values.minCoeff() > -1e-14 * (1.0 + r.values.size() * gm.norm() / c));
    }
}

TEST_CASE("push-through identity on explicit features") {
    auto& g = test::rng(28);
    for (int rep = 0; rep < 20; ++rep) {
        const Eigen::Index d = 2 + rep % 7, n = 10 + rep;
        const Eigen::MatrixXd phi = test::gaussian_matrix(d, n, g);
        const Eigen::MatrixXd psi = test::gaussian_matrix(d, n, g);
        const double c = n * 1e-2;
        const Eigen::MatrixXd idd = Eigen::MatrixXd::Identity(d, d);
        const Eigen::MatrixXd idn = Eigen::MatrixXd::Identity(n, n);
        const Eigen::MatrixXd feat = (phi * phi.transpose() + c * idd).inverse() * phi *
                                     psi.transpose() *
                                     (psi * psi.transpose() + c * idd).inverse() * psi *
                                     phi.transpose();
        const Eigen::MatrixXd gxx = phi.transpose() * phi, gyy = psi.transpose() * psi;
        const Eigen::MatrixXd gram = (gyy + c * idn).inverse() * gyy * gxx * (gxx + c * idn).inverse();
        const auto a = eig_nonsymmetric(feat);
        const auto b = eig_nonsymmetric(gram);
        for (Eigen::Index j = 0; j < d; ++j)
            CHECK(a.values(j) == doctest::Approx(b.values(j)).epsilon(1e-8).scale(1.0));
        for (Eigen::Index j = d; j < n; ++j) CHECK(std::abs(b.values(j)) < 1e-8);
    }
}

TEST_CASE("psd_product_eig: symmetric and nonsymmetric paths agree") {
    auto& g = test::rng(29);
    for (int rep = 0; rep < 25; ++rep) {
        const Eigen::Index n = 6 + rep;
        const Eigen::MatrixXd gm = test::random_psd(n, 2 + rep % n, g);
        const Eigen::MatrixXd h = test::random_psd(n, 1 + (3 * rep) % n, g);
        const double c = n * (rep % 2 ? 1e-2 : 1e-5);
        const auto s = psd_product_eig(gm, h, c, ProductPath::Symmetric);
        const auto u = psd_product_eig(gm, h, c, ProductPath::Nonsymmetric);
        const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
        const Eigen::MatrixXd m = gm * (gm + c * id).inverse() * (h + c * id).inverse() * h;
        for (Eigen::Index j = 0; j < n; ++j) {
            CHECK(s.values(j) == doctest::Approx(u.values(j)).epsilon(1e-8).scale(1.0));
            // Eigenvectors for well-separated nonzero eigenvalues coincide.
            const bool separated =
                s.values(j) > 1e-6 &&
                (j == 0 || s.values(j - 1) - s.values(j) > 1e-4) &&
                (j + 1 == n || s.values(j) - s.values(j + 1) > 1e-4);
            if (separated) {
                CHECK((m * s.vectors.col(j) - s.values(j) * s.vectors.col(j)).norm() < 1e-8);
                CHECK(test::abs_cos(s.vectors.col(j), u.vectors.col(j)) > 1 - 1e-8);
            }
        }
    }
}
