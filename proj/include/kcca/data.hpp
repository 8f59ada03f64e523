#pragma once

#include "kcca/kernels.hpp"

#include <optional>

namespace kcca {

/// Paired samples (x_i, y_i), typically y_i = flow^tau(x_i). Points are rows.
struct TrajectoryPairs {
    PointSet x;
    PointSet y;
    double lag_time = 0.0;
    std::optional<double> start_time;

    Eigen::Index size() const noexcept { return x.rows(); }

    /// Throws InputError unless |X| = |Y| = n >= min_n.
    void validate(const char* module, const char* operation, Eigen::Index min_n = 2) const;
};

}  // namespace kcca
