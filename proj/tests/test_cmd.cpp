#include "kcca/cca.hpp"
#include "kcca/cmd.hpp"
#include "kcca/error.hpp"
#include "kcca/io.hpp"
#include "support.hpp"

#include <doctest.h>

#include <filesystem>
#include <numbers>

using namespace kcca;
using linalg::RegParam;

namespace {

SnapshotMatrices random_snapshots(Eigen::Index d, Eigen::Index n, std::mt19937_64& g) {
    const Eigen::MatrixXd z = test::gaussian_matrix(d, n + 1, g);
    // Mild temporal correlation so that the leading pairs are well separated.
    Eigen::MatrixXd s = z;
    for (Eigen::Index i = 1; i <= n; ++i) s.col(i) = 0.8 * s.col(i - 1) + 0.6 * z.col(i);
    return SnapshotMatrices::sequential(s);
}

double lsq_residual(const Eigen::MatrixXd& basis, const Eigen::VectorXd& target) {
    const Eigen::VectorXd coef = basis.colPivHouseholderQr().solve(target);
    return (basis * coef - target).norm() / std::max(target.norm(), 1e-300);
}

}  // namespace

TEST_CASE("rank-1 sinusoid") {
    auto& g = test::rng(201);
    const Eigen::Index d = 1000, m = 101;
    const Eigen::VectorXd u = test::gaussian_matrix(d, 1, g);
    Eigen::MatrixXd z(d, m);
    for (Eigen::Index i = 0; i < m; ++i)
        z.col(i) = std::sin(2 * std::numbers::pi * static_cast<double>(i) / (m - 1)) * u;
    const auto snap = SnapshotMatrices::sequential(z);
    const double eps = 1e-6;
    const auto r = cmd(snap, RegParam{eps}, CmdOptions{.k = 3});
    CHECK(r.rho(0) > 0.99);
    CHECK(test::abs_cos(r.xi.col(0), u) > 1 - 1e-10);

    // Closed form for rank-one views X = u s^T, Y = u t^T:
    // rho^2 = a/(a + c) * b/(b + c) * cos^2(s, t), a = |u|^2 |s|^2, b = |u|^2 |t|^2.
    const Eigen::VectorXd s = snap.x.transpose() * u / u.squaredNorm();
    const Eigen::VectorXd t = snap.y.transpose() * u / u.squaredNorm();
    const double c = static_cast<double>(snap.n()) * eps;
    const double a = u.squaredNorm() * s.squaredNorm(), b = u.squaredNorm() * t.squaredNorm();
    const double cos2 = std::pow(s.dot(t) / (s.norm() * t.norm()), 2);
    CHECK(r.rho_squared(0) == doctest::Approx(a / (a + c) * b / (b + c) * cos2).epsilon(1e-10));
    // Further modes carry no correlation.
    CHECK(r.absent.size() == 2);
    CHECK(r.eta.col(1).norm() == 0.0);
}

TEST_CASE("identity dynamics") {
    auto& g = test::rng(202);
    const Eigen::MatrixXd x = test::gaussian_matrix(40, 12, g);
    const double eps = 1e-3, c = 12 * eps;
    const auto r = cmd(SnapshotMatrices{x, x}, RegParam{eps}, CmdOptions{.k = 6});
    const Eigen::VectorXd lam = test::reference_symmetric(x.transpose() * x);
    for (Eigen::Index j = 0; j < 6; ++j) {
        const double q = lam(j) / (lam(j) + c);
        CHECK(r.rho_squared(j) == doctest::Approx(q * q).epsilon(1e-10));
        CHECK(test::abs_cos(r.xi.col(j), r.eta.col(j)) > 1 - 1e-10);
    }
}

TEST_CASE("CMD is uncentered linear-kernel CCA with variant (i) and recovery (i)") {
    auto& g = test::rng(203);
    for (int rep = 0; rep < 5; ++rep) {
        const auto snap = random_snapshots(60 + 20 * rep, 15, g);
        const RegParam reg{1e-3};
        const auto r = cmd(snap, reg, CmdOptions{.k = 5});
        TrajectoryPairs p{snap.x.transpose(), snap.y.transpose()};
        const Kernel lin(LinearKernel{});
        const auto kc = kernel_cca(p, lin, lin, reg,
                                   CcaOptions{.k = 5,
                                              .centered = false,
                                              .variant = CcaFormulation::GramVariantI,
                                              .g_recovery = GRecovery::I});
        REQUIRE(kc.k() == 5);
        CHECK((r.rho - kc.rho).cwiseAbs().maxCoeff() < 1e-8);
        for (Eigen::Index j = 0; j < 5; ++j) {
            CHECK(test::abs_cos(r.v.col(j), kc.v.col(j)) > 1 - 1e-8);
            CHECK(test::abs_cos(r.w.col(j), kc.w.col(j)) > 1 - 1e-8);
        }
        // Random states: xi^T x equals the f-hat evaluation up to the common sign.
        for (int t = 0; t < 3; ++t) {
            const Eigen::VectorXd state = test::gaussian_matrix(snap.d(), 1, g);
            for (Eigen::Index j = 0; j < 5; ++j) {
                const double sign = r.v.col(j).dot(kc.v.col(j)) < 0 ? -1.0 : 1.0;
                const double a = evaluate_mode(r, Side::F, j, state);
                const double b = sign * evaluate_eigenfunction(kc, Side::F, j, state);
                CHECK(std::abs(a - b) <= 1e-8 * std::max(1.0, std::abs(b)));
                const double ag = evaluate_mode(r, Side::G, j, state);
                const double bg = sign * evaluate_eigenfunction(kc, Side::G, j, state);
                CHECK(std::abs(ag - bg) <= 1e-8 * std::max(1.0, std::abs(bg)));
            }
        }
    }
}

TEST_CASE("modes lie in the snapshot column spaces") {
    auto& g = test::rng(204);
    const auto snap = random_snapshots(200, 20, g);
    const auto r = cmd(snap, RegParam{1e-4}, CmdOptions{.k = 8});
    for (Eigen::Index j = 0; j < 8; ++j) {
        CHECK(lsq_residual(snap.x, r.xi.col(j)) < 1e-8);
        CHECK(lsq_residual(snap.y, r.eta.col(j)) < 1e-8);
    }
}

TEST_CASE("orthogonal transformations leave rho unchanged") {
    auto& g = test::rng(205);
    const auto snap = random_snapshots(50, 20, g);
    const Eigen::MatrixXd q = test::gaussian_matrix(50, 50, g).householderQr().householderQ();
    const auto a = cmd(snap, RegParam{1e-3}, CmdOptions{.k = 10});
    const auto b = cmd(SnapshotMatrices{q * snap.x, q * snap.y}, RegParam{1e-3}, CmdOptions{.k = 10});
    CHECK((a.rho - b.rho).cwiseAbs().maxCoeff() < 1e-8);
    for (Eigen::Index j = 0; j < 10; ++j) CHECK(test::abs_cos(q * a.xi.col(j), b.xi.col(j)) > 1 - 1e-8);
}

TEST_CASE("evaluate_mode") {
    auto& g = test::rng(206);
    const auto snap = random_snapshots(30, 10, g);
    const auto r = cmd(snap, RegParam{1e-3}, CmdOptions{.k = 4});
    for (Eigen::Index j = 0; j < 4; ++j) {
        CHECK(evaluate_mode(r, Side::F, j, Eigen::VectorXd::Zero(30)) == 0.0);
        const Eigen::VectorXd xi = r.xi.col(j);
        CHECK(evaluate_mode(r, Side::F, j, xi / xi.squaredNorm()) == doctest::Approx(1.0));
    }
    CHECK_THROWS_AS(evaluate_mode(r, Side::F, 0, Eigen::VectorXd::Zero(29)), InputError);
    CHECK_THROWS_AS(evaluate_mode(r, Side::G, 4, Eigen::VectorXd::Zero(30)), InputError);
    SUBCASE("centered results subtract the snapshot mean") {
        const auto c = cmd(snap, RegParam{1e-3}, CmdOptions{.k = 2, .centered = true});
        CHECK(c.centered);
        CHECK(evaluate_mode(c, Side::F, 0, snap.x.rowwise().mean()) == doctest::Approx(0.0).scale(1.0));
        CHECK((c.mean_x - snap.x.rowwise().mean()).norm() == 0.0);
    }
}

TEST_CASE("input validation") {
    const Eigen::MatrixXd x = Eigen::MatrixXd::Random(5, 4);
    CHECK_THROWS_AS(cmd(SnapshotMatrices{x, Eigen::MatrixXd::Random(5, 3)}, RegParam{1e-3}), InputError);
    CHECK_THROWS_AS(cmd(SnapshotMatrices{x, Eigen::MatrixXd::Random(6, 4)}, RegParam{1e-3}), InputError);
    CHECK_THROWS_AS(cmd(SnapshotMatrices{x, x}, RegParam{0.0}), InputError);
    CHECK_THROWS_AS(cmd(SnapshotMatrices{x.leftCols(1), x.leftCols(1)}, RegParam{1e-3}), InputError);
    CHECK_THROWS_AS(SnapshotMatrices::sequential(x, 2), InputError);
    CHECK_THROWS_AS(SnapshotMatrices::sequential(x, -1), InputError);
}

TEST_CASE("sequential construction and transient skip") {
    Eigen::MatrixXd z(2, 6);
    z << 0, 1, 2, 3, 4, 5, 10, 11, 12, 13, 14, 15;
    const auto s = SnapshotMatrices::sequential(z, 2);
    REQUIRE(s.n() == 3);
    CHECK(s.x(0, 0) == 2);
    CHECK(s.y(0, 0) == 3);
    CHECK(s.y(1, 2) == 15);
}

TEST_CASE("result files round-trip") {
    auto& g = test::rng(207);
    const auto snap = random_snapshots(25, 8, g);
    const auto r = cmd(snap, RegParam{1e-3}, CmdOptions{.k = 3});
    const auto dir = std::filesystem::temp_directory_path() / "kcca_test_cmd_out";
    std::filesystem::remove_all(dir);
    write_cmd_result(r, dir);
    CHECK(io::read_snapshot_file(dir / "xi.cmdx") == r.xi);
    CHECK(io::read_snapshot_file(dir / "eta.cmdx") == r.eta);
    const Eigen::MatrixXd rho = io::read_matrix_csv(dir / "rho.csv");
    for (Eigen::Index j = 0; j < 3; ++j) CHECK(rho(j) == r.rho(j));
    CHECK(std::filesystem::exists(dir / "metadata.json"));
    std::filesystem::remove_all(dir);
}
