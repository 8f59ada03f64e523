#include "instances.hpp"
#include "kcca/cmd.hpp"
#include "kcca/error.hpp"
#include "kcca/parallel.hpp"
#include "kcca/pipelines.hpp"

#include <doctest.h>

#include <cstring>

using namespace kcca;

TEST_CASE("four formulations agree on the top five correlations") {
    auto& g = test::rng(601);
    int small_eps = 0;
    for (int rep = 0; rep < 50; ++rep) {
        const auto inst = test::agreement_instance(g);
        small_eps += inst.epsilon < 1e-3;
        const auto rho = test::four_way_rho(inst, 5);
        INFO("instance " << rep << " n=" << inst.fx.cols() << " eps=" << inst.epsilon);
        CHECK(test::four_way_spread(rho, 5) < 1e-6);
    }
    // Both regularization levels are exercised.
    CHECK(small_eps > 5);
    CHECK(small_eps < 45);
}

TEST_CASE("every rho squared lies in [0, 1) on random problems") {
    auto& g = test::rng(602);
    int failures = 0;
    for (int rep = 0; rep < 200; ++rep) {
        const auto inst = test::fuzz_instance(g);
        INFO("instance " << rep << ": " << inst.label);
        try {
            const auto r = test::run_fuzz(inst);
            CHECK(r.k() >= 1);
            for (Eigen::Index j = 0; j < r.k(); ++j) {
                CHECK(r.rho_squared(j) >= 0.0);
                CHECK(r.rho_squared(j) < 1.0);
                CHECK(r.rho(j) == doctest::Approx(std::sqrt(r.rho_squared(j))));
            }
            for (Eigen::Index j = 1; j < r.k(); ++j) CHECK(r.rho(j) <= r.rho(j - 1) + 1e-12);
        } catch (const Error& e) {
            ++failures;
            FAIL_CHECK(std::string(e.what()));
        }
    }
    CHECK(failures == 0);
}

TEST_CASE("results are bit-identical across thread counts") {
    auto& g = test::rng(603);
    TrajectoryPairs p{test::gaussian_matrix(150, 2, g), {}};
    p.y = p.x.array().cos().matrix();
    const Kernel k(GaussianKernel{0.7});

    auto run_all = [&] {
        std::vector<Eigen::MatrixXd> out;
        const auto r = kernel_cca(p, k, k, linalg::RegParam{1e-4}, CcaOptions{.k = 6});
        out.push_back(r.rho);
        out.push_back(r.f_on_X);
        out.push_back(r.g_on_Y);
        out.push_back(evaluate_eigenfunctions(r, Side::F, test::gaussian_matrix(20, 2, test::rng(604))));
        const auto gen = kernel_cca_generalized(p, k, k, linalg::RegParam{1e-4}, CcaOptions{.k = 6});
        out.push_back(gen.rho);
        out.push_back(gen.v);

        BickleyPipeline bp;
        bp.n = 300;
        bp.seed = 9;
        bp.epsilon = 1e-6;
        const auto b = run_bickley(bp);
        out.push_back(b.pairs.y);
        out.push_back(b.cca.f_on_X);
        out.push_back(b.partition.centers);
        Eigen::VectorXd lb(b.partition.labels.size());
        for (std::size_t i = 0; i < b.partition.labels.size(); ++i)
            lb(static_cast<Eigen::Index>(i)) = b.partition.labels[i];
        out.push_back(lb);

        WellsPipeline wp;
        wp.n = 200;
        wp.seed = 4;
        wp.sde.t1 = 0.5;
        const auto w = run_wells(wp);
        out.push_back(w.pairs.y);
        out.push_back(w.cca.rho);
        out.push_back(w.partition.centers);

        const auto c = cmd(SnapshotMatrices::sequential(test::gaussian_matrix(500, 30, test::rng(605))),
                           linalg::RegParam{1e-3}, CmdOptions{.k = 5});
        out.push_back(c.xi);
        out.push_back(c.eta);
        return out;
    };

    set_num_threads(1);
    const auto one = run_all();
    set_num_threads(8);
    const auto eight = run_all();
    set_num_threads(0);
    REQUIRE(one.size() == eight.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
        INFO("output " << i);
        CHECK(one[i].rows() == eight[i].rows());
        CHECK(one[i].cols() == eight[i].cols());
        CHECK(std::memcmp(one[i].data(), eight[i].data(), sizeof(double) * one[i].size()) == 0);
    }
}
