#pragma once

#include "kcca/cca.hpp"
#include "kcca/clustering.hpp"
#include "kcca/dynamics.hpp"

#include <cstdint>

namespace kcca {

struct BickleyPipeline {
    BickleyConfig flow;
    Eigen::Index n = 10000;
    std::uint64_t seed = 0;
    double sigma = 1.0;
    double epsilon = 1e-7;
    Eigen::Index k = 10;
    bool centered = true;
    int clusters = 9;
    /// Leading eigenfunctions that form the clustering embedding.
    Eigen::Index embed_dims = 8;
    int restarts = 10;
};

struct WellsPipeline {
    FiveWellConfig sde;
    Eigen::Index n = 1000;
    std::uint64_t seed = 0;
    double sigma = 1.0;
    double epsilon = 1e-6;
    Eigen::Index k = 10;
    bool centered = true;
    int clusters = 5;
    Eigen::Index embed_dims = 4;
    int restarts = 10;
};

struct CoherentSetRun {
    TrajectoryPairs pairs;
    CcaResult cca;
    Embedding embedding;
    Partition partition;
};

/// Uniform samples, flow map, kernel CCA, k-means on the f-hat embedding.
CoherentSetRun run_bickley(const BickleyPipeline& cfg);

/// Uniform samples, Euler-Maruyama endpoints, kernel CCA, k-means. The SDE
/// noise streams derive from cfg.seed, not from cfg.sde.seed.
CoherentSetRun run_wells(const WellsPipeline& cfg);

/// Embedding of the first `dims` columns of f_on_X.
Embedding cca_embedding(const CcaResult& cca, Eigen::Index dims);

/// Regular nx x ny grid over the domain, row-major in x2 then x1 (x1 fastest).
PointSet regular_grid(const Domain& domain, int nx, int ny);

}  // namespace kcca
