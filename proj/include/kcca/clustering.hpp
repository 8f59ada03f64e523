#pragma once

#include "kcca/data.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace kcca {

/// Samples embedded by eigenfunction values, one sample per row.
struct Embedding {
    Eigen::MatrixXd points;
    /// Which eigenfunction indices produced the columns.
    std::vector<Eigen::Index> columns;
    std::string source;
};

struct Partition {
    std::vector<int> labels;
    Eigen::MatrixXd centers;
    double inertia = 0.0;
    /// Restart that produced the partition.
    int restart = 0;
    int iterations = 0;
};

struct KMeansOptions {
    int restarts = 10;
    int max_iterations = 300;
};

/// Best of `restarts` Lloyd runs seeded by k-means++. Restart r draws from
/// split_seed(seed, r); the winner minimizes (inertia, r). Every cluster of
/// the result is nonempty and every label is the nearest center.
Partition kmeans(const Embedding& emb, int k, std::uint64_t seed, const KMeansOptions& options = {});

/// Cluster-size-weighted mean over clusters of the fraction of within-cluster
/// pairs whose endpoint (Y) distance is below the given quantile of all
/// endpoint pair distances. Singleton clusters count as 1. With `period`,
/// the first coordinate is treated as periodic.
double coherence_score(const TrajectoryPairs& pairs, const std::vector<int>& labels,
                       double radius_quantile = 0.1,
                       std::optional<double> period = std::nullopt);

}  // namespace kcca
