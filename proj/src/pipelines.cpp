#include "kcca/pipelines.hpp"

#include "kcca/error.hpp"

namespace kcca {

namespace {

constexpr std::uint64_t kNoiseStream = 0x5DEECE66Dull;

CoherentSetRun finish(TrajectoryPairs pairs, double sigma, double epsilon, Eigen::Index k,
                      bool centered, Eigen::Index dims, int clusters, int restarts,
                      std::uint64_t seed) {
    CoherentSetRun run;
    run.pairs = std::move(pairs);
    const Kernel kernel(GaussianKernel{sigma});
    CcaOptions opts;
    opts.k = k;
    opts.centered = centered;
    run.cca = kernel_cca(run.pairs, kernel, kernel, linalg::RegParam{epsilon}, opts);
    run.embedding = cca_embedding(run.cca, dims);
    KMeansOptions km;
    km.restarts = restarts;
    run.partition = kmeans(run.embedding, clusters, seed, km);
    return run;
}

}  // namespace

Embedding cca_embedding(const CcaResult& cca, Eigen::Index dims) {
    if (dims < 1 || dims > cca.k())
        throw InputError("clustering", "embedding",
                         "embedding needs between 1 and " + std::to_string(cca.k()) +
                             " eigenfunctions");
    Embedding e;
    e.points = cca.f_on_X.leftCols(dims);
    for (Eigen::Index j = 0; j < dims; ++j) e.columns.push_back(j);
    e.source = "f_on_X";
    return e;
}

CoherentSetRun run_bickley(const BickleyPipeline& cfg) {
    const PointSet x0 = sample_uniform(cfg.flow.domain(), cfg.n, cfg.seed);
    return finish(bickley_pairs(cfg.flow, x0), cfg.sigma, cfg.epsilon, cfg.k, cfg.centered,
                  cfg.embed_dims, cfg.clusters, cfg.restarts, cfg.seed);
}

CoherentSetRun run_wells(const WellsPipeline& cfg) {
    FiveWellConfig sde = cfg.sde;
    sde.seed = split_seed(cfg.seed, kNoiseStream);
    const PointSet x0 = sample_uniform(sde.domain(), cfg.n, cfg.seed);
    return finish(five_well_pairs(sde, x0), cfg.sigma, cfg.epsilon, cfg.k, cfg.centered,
                  cfg.embed_dims, cfg.clusters, cfg.restarts, cfg.seed);
}

PointSet regular_grid(const Domain& domain, int nx, int ny) {
    if (domain.dim() != 2 || nx < 2 || ny < 2)
        throw InputError("dynamics", "regular_grid", "need a 2-D domain and at least 2x2 nodes");
    PointSet g(static_cast<Eigen::Index>(nx) * ny, 2);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const Eigen::Index r = static_cast<Eigen::Index>(j) * nx + i;
            g(r, 0) = domain.lo(0) + (domain.hi(0) - domain.lo(0)) * i / (nx - 1);
            g(r, 1) = domain.lo(1) + (domain.hi(1) - domain.lo(1)) * j / (ny - 1);
        }
    return g;
}

}  // namespace kcca
