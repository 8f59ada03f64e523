#include "kcca/clustering.hpp"

#include "kcca/dynamics.hpp"
#include "kcca/error.hpp"
#include "kcca/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

namespace kcca {

namespace {

constexpr const char* kModule = "clustering";

int nearest(const Eigen::MatrixXd& centers, const Eigen::Ref<const Eigen::RowVectorXd>& p,
            double* dist = nullptr) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < centers.rows(); ++c) {
        const double d = (centers.row(c) - p).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(c);
        }
    }
    if (dist) *dist = best_d;
    return best;
}

Eigen::MatrixXd plus_plus_seeding(const Eigen::MatrixXd& x, int k, std::mt19937_64& rng) {
    const Eigen::Index n = x.rows();
    Eigen::MatrixXd centers(k, x.cols());
    std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
    centers.row(0) = x.row(first(rng));
    Eigen::VectorXd d2(n);
    for (Eigen::Index i = 0; i < n; ++i) d2(i) = (x.row(i) - centers.row(0)).squaredNorm();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int c = 1; c < k; ++c) {
        const double total = d2.sum();
        Eigen::Index pick = 0;
        if (total > 0.0) {
            double target = unit(rng) * total;
            for (pick = 0; pick < n - 1; ++pick) {
                target -= d2(pick);
                if (target < 0.0) break;
            }
        } else {
            pick = first(rng);
        }
        centers.row(c) = x.row(pick);
        for (Eigen::Index i = 0; i < n; ++i)
            d2(i) = std::min(d2(i), (x.row(i) - centers.row(c)).squaredNorm());
    }
    return centers;
}

Partition lloyd(const Eigen::MatrixXd& x, int k, std::uint64_t seed, int max_iterations) {
    const Eigen::Index n = x.rows();
    std::mt19937_64 rng(seed);
    Partition p;
    p.centers = plus_plus_seeding(x, k, rng);
    p.labels.assign(static_cast<std::size_t>(n), -1);
    std::vector<double> dist(static_cast<std::size_t>(n));
    for (int it = 0; it < max_iterations; ++it) {
        p.iterations = it + 1;
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            const int l = nearest(p.centers, x.row(i), &dist[static_cast<std::size_t>(i)]);
            if (l != p.labels[static_cast<std::size_t>(i)]) {
                p.labels[static_cast<std::size_t>(i)] = l;
                changed = true;
            }
        }
        std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
        for (int l : p.labels) ++counts[static_cast<std::size_t>(l)];
        bool reseeded = false;
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) continue;
            // Empty cluster: move its center to the point farthest from its own center.
            const auto far = std::max_element(dist.begin(), dist.end()) - dist.begin();
            --counts[static_cast<std::size_t>(p.labels[static_cast<std::size_t>(far)])];
            p.labels[static_cast<std::size_t>(far)] = c;
            counts[static_cast<std::size_t>(c)] = 1;
            dist[static_cast<std::size_t>(far)] = 0.0;
            reseeded = true;
        }
        if (!changed && !reseeded) break;
        p.centers.setZero();
        for (Eigen::Index i = 0; i < n; ++i)
            p.centers.row(p.labels[static_cast<std::size_t>(i)]) += x.row(i);
        for (int c = 0; c < k; ++c)
            p.centers.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
    }
    // Final assignment against the final centers keeps labels = argmin.
    for (Eigen::Index i = 0; i < n; ++i)
        p.labels[static_cast<std::size_t>(i)] = nearest(p.centers, x.row(i));
    p.inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        p.inertia += (x.row(i) - p.centers.row(p.labels[static_cast<std::size_t>(i)])).squaredNorm();
    return p;
}

bool all_nonempty(const Partition& p, int k) {
    std::vector<bool> seen(static_cast<std::size_t>(k), false);
    for (int l : p.labels) seen[static_cast<std::size_t>(l)] = true;
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

}  // namespace

Partition kmeans(const Embedding& emb, int k, std::uint64_t seed, const KMeansOptions& options) {
    const Eigen::MatrixXd& x = emb.points;
    if (x.cols() < 1) throw InputError(kModule, "kmeans", "embedding needs at least one column");
    if (!x.allFinite()) throw InputError(kModule, "kmeans", "non-finite embedding entries");
    if (k < 1) throw InputError(kModule, "kmeans", "k must be >= 1");
    if (k > x.rows()) throw InputError(kModule, "kmeans", "k exceeds the number of samples");
    if (options.restarts < 1 || options.max_iterations < 1)
        throw InputError(kModule, "kmeans", "restarts and iterations must be >= 1");

    std::vector<Partition> runs(static_cast<std::size_t>(options.restarts));
    parallel_for(options.restarts, [&](Eigen::Index begin, Eigen::Index end) {
        for (Eigen::Index r = begin; r < end; ++r) {
            runs[static_cast<std::size_t>(r)] =
                lloyd(x, k, split_seed(seed, static_cast<std::uint64_t>(r)),
                      options.max_iterations);
            runs[static_cast<std::size_t>(r)].restart = static_cast<int>(r);
        }
    });
    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r)
        if (runs[r].inertia < runs[best].inertia) best = r;
    Partition out = std::move(runs[best]);
    if (!all_nonempty(out, k))
        throw NumericalError(kModule, "kmeans", "a cluster is empty after convergence");
    return out;
}

double coherence_score(const TrajectoryPairs& pairs, const std::vector<int>& labels,
                       double radius_quantile, std::optional<double> period) {
    const Eigen::Index n = pairs.y.rows();
    if (static_cast<Eigen::Index>(labels.size()) != n)
        throw InputError(kModule, "coherence_score", "labels do not match the sample count");
    if (!(radius_quantile > 0.0 && radius_quantile < 1.0))
        throw InputError(kModule, "coherence_score", "quantile must lie in (0, 1)");
    if (n < 2) throw InputError(kModule, "coherence_score", "need at least 2 samples");
    const Eigen::MatrixXd& y = pairs.y;
    auto distance = [&](Eigen::Index i, Eigen::Index j) {
        double s = 0.0;
        for (Eigen::Index c = 0; c < y.cols(); ++c) {
            double d = std::abs(y(i, c) - y(j, c));
            if (c == 0 && period) {
                d = std::fmod(d, *period);
                d = std::min(d, *period - d);
            }
            s += d * d;
        }
        return std::sqrt(s);
    };

    std::vector<double> all;
    all.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) all.push_back(distance(i, j));
    const auto q = static_cast<std::size_t>(radius_quantile * static_cast<double>(all.size() - 1));
    std::nth_element(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(q), all.end());
    const double radius = all[q];

    std::map<int, std::vector<Eigen::Index>> members;
    for (Eigen::Index i = 0; i < n; ++i) members[labels[static_cast<std::size_t>(i)]].push_back(i);
    double score = 0.0;
    for (const auto& [label, idx] : members) {
        const auto m = static_cast<Eigen::Index>(idx.size());
        double frac = 1.0;
        if (m > 1) {
            std::size_t close = 0, total = 0;
            for (Eigen::Index a = 0; a < m; ++a)
                for (Eigen::Index b = a + 1; b < m; ++b) {
                    ++total;
                    if (distance(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]) <
                        radius)
                        ++close;
                }
            frac = static_cast<double>(close) / static_cast<double>(total);
        }
        score += frac * static_cast<double>(m) / static_cast<double>(n);
    }
    return score;
}

}  // namespace kcca
