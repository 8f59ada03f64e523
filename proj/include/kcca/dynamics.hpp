#pragma once

#include "kcca/data.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

namespace kcca {

/// Axis-aligned box [lo, hi].
struct Domain {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;

    Eigen::Index dim() const noexcept { return lo.size(); }
    Eigen::VectorXd center() const { return 0.5 * (lo + hi); }
};

/// Perturbed Bickley jet. Lengths in Mm, time in days.
struct BickleyConfig {
    double u0 = 5.4138;  // 62.66 m/s
    double length = 1.77;
    double radius = 6.371;
    std::array<double, 3> amplitudes{0.075, 0.4, 0.3};
    /// Wave speeds as multiples of u0.
    std::array<double, 3> speed_factors{0.1446, 0.205, 0.461};
    double step = 0.1;
    double tau = 40.0;
    double period = 20.0;
    double y_extent = 3.0;

    /// k_n = 2n / r0 for n = 1, 2, 3.
    double wavenumber(int n) const { return 2.0 * n / radius; }
    double wave_speed(int n) const { return speed_factors[n - 1] * u0; }
    Domain domain() const;
};

double bickley_stream(const BickleyConfig& cfg, const Eigen::Vector2d& x, double t);

/// (-d psi / d x2, d psi / d x1), evaluated without reducing x1.
Eigen::Vector2d bickley_velocity(const BickleyConfig& cfg, const Eigen::Vector2d& x, double t);

/// Fixed-step RK4 from t0 to t0 + tau on the unwrapped x1 coordinate; the
/// endpoint's x1 is reduced to [0, period).
Eigen::Vector2d bickley_flow_map(const BickleyConfig& cfg, const Eigen::Vector2d& x0, double t0,
                                 double tau);

/// Flow map applied to every row of x0 in parallel.
TrajectoryPairs bickley_pairs(const BickleyConfig& cfg, const PointSet& x0, double t0 = 0.0);

/// Rotating s-well potential with periodically moving wells.
struct FiveWellConfig {
    /// Inverse temperature; +infinity disables the noise.
    double beta = 3.0;
    int wells = 5;
    double step = 1e-3;
    double t0 = 0.0;
    double t1 = 10.0;
    std::uint64_t seed = 0;

    Domain domain() const;
    void validate() const;
};

double five_well_potential(const Eigen::Vector2d& x, double t, int s);

/// Analytic gradient in x. Throws InputError for |x| < 1e-8.
Eigen::Vector2d five_well_grad(const Eigen::Vector2d& x, double t, int s);

/// Index in [0, s) of the rotating angular sector containing x; sector
/// boundaries are the ridges of the angular term.
int five_well_sector(const Eigen::Vector2d& x, double t, int s);

/// Euler-Maruyama over [t0, t1] with step h:
/// X_{k+1} = X_k - grad V(X_k, t_k) h + sqrt(2 h / beta) xi_k.
/// Noise comes from a generator seeded by `stream_seed`. When `path` is given,
/// the state after every `record_stride` steps is appended (the initial state
/// first). Throws NumericalError if |X| exceeds 1e3.
Eigen::Vector2d euler_maruyama(const FiveWellConfig& cfg, const Eigen::Vector2d& x0,
                               std::uint64_t stream_seed,
                               std::vector<Eigen::Vector2d>* path = nullptr,
                               long record_stride = 1);

/// Endpoints for every row of x0. Trajectory i uses split_seed(cfg.seed, i).
TrajectoryPairs five_well_pairs(const FiveWellConfig& cfg, const PointSet& x0);

/// Positions of every trajectory at t0 + j * record_stride * h, j = 0, 1, ...
/// Result[j] is n x 2.
std::vector<PointSet> five_well_snapshots(const FiveWellConfig& cfg, const PointSet& x0,
                                          long record_stride);

/// SplitMix64 hash of (master, index); independent streams per trajectory.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t index);

/// n points uniformly distributed in the domain, reproducible from seed.
PointSet sample_uniform(const Domain& domain, Eigen::Index n, std::uint64_t seed);

/// Noisy generalized superellipse |x|^p + |y|^p = 1: theta uniform,
/// x = sgn(cos) |cos|^{2/p}, y = sgn(sin) |sin|^{2/p}, plus Gaussian noise.
/// X holds x and Y holds y, one-dimensional each.
TrajectoryPairs superellipse_pairs(Eigen::Index n, std::uint64_t seed, double exponent = 4.0,
                                   double noise = 0.05);

}  // namespace kcca
