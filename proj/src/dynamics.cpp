#include "kcca/dynamics.hpp"

#include "kcca/error.hpp"
#include "kcca/parallel.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace kcca {

namespace {

constexpr const char* kModule = "dynamics";
constexpr double kPi = std::numbers::pi;

double sech2(double z) {
    const double c = std::cosh(z);
    return 1.0 / (c * c);
}

}  // namespace

Domain BickleyConfig::domain() const {
    Domain d;
    d.lo = Eigen::Vector2d(0.0, -y_extent);
    d.hi = Eigen::Vector2d(period, y_extent);
    return d;
}

double bickley_stream(const BickleyConfig& cfg, const Eigen::Vector2d& x, double t) {
    const double z = x(1) / cfg.length;
    double sum = 0.0;
    for (int n = 1; n <= 3; ++n)
        sum += cfg.amplitudes[n - 1] *
               std::cos(cfg.wavenumber(n) * (x(0) - cfg.wave_speed(n) * t));
    return -cfg.u0 * cfg.length * std::tanh(z) + cfg.u0 * cfg.length * sech2(z) * sum;
}

Eigen::Vector2d bickley_velocity(const BickleyConfig& cfg, const Eigen::Vector2d& x, double t) {
    const double z = x(1) / cfg.length;
    const double s2 = sech2(z);
    double cos_sum = 0.0, sin_sum = 0.0;
    for (int n = 1; n <= 3; ++n) {
        const double k = cfg.wavenumber(n);
        const double phase = k * (x(0) - cfg.wave_speed(n) * t);
        cos_sum += cfg.amplitudes[n - 1] * std::cos(phase);
        sin_sum += cfg.amplitudes[n - 1] * k * std::sin(phase);
    }
    return {cfg.u0 * s2 + 2.0 * cfg.u0 * s2 * std::tanh(z) * cos_sum,
            -cfg.u0 * cfg.length * s2 * sin_sum};
}

Eigen::Vector2d bickley_flow_map(const BickleyConfig& cfg, const Eigen::Vector2d& x0, double t0,
                                 double tau) {
    if (!x0.allFinite() || !std::isfinite(t0) || !std::isfinite(tau))
        throw NumericalError(kModule, "bickley_flow_map", "non-finite initial state or time");
    if (!(cfg.step > 0.0)) throw InputError(kModule, "bickley_flow_map", "step must be > 0");
    const long steps = std::lround(std::abs(tau) / cfg.step);
    const double h = steps > 0 ? tau / static_cast<double>(steps) : 0.0;
    Eigen::Vector2d x = x0;
    double t = t0;
    for (long i = 0; i < steps; ++i) {
        const Eigen::Vector2d k1 = bickley_velocity(cfg, x, t);
        const Eigen::Vector2d k2 = bickley_velocity(cfg, x + 0.5 * h * k1, t + 0.5 * h);
        const Eigen::Vector2d k3 = bickley_velocity(cfg, x + 0.5 * h * k2, t + 0.5 * h);
        const Eigen::Vector2d k4 = bickley_velocity(cfg, x + h * k3, t + h);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t = t0 + static_cast<double>(i + 1) * h;
    }
    if (!x.allFinite())
        throw NumericalError(kModule, "bickley_flow_map", "state became non-finite");
    if (steps > 0) {
        x(0) = std::fmod(x(0), cfg.period);
        if (x(0) < 0.0) x(0) += cfg.period;
        if (x(0) >= cfg.period) x(0) = 0.0;
    }
    return x;
}

TrajectoryPairs bickley_pairs(const BickleyConfig& cfg, const PointSet& x0, double t0) {
    if (x0.cols() != 2) throw InputError(kModule, "bickley_pairs", "points must be 2-D");
    TrajectoryPairs p;
    p.x = x0;
    p.y.resize(x0.rows(), 2);
    p.lag_time = cfg.tau;
    p.start_time = t0;
    parallel_for(x0.rows(), [&](Eigen::Index begin, Eigen::Index end) {
        for (Eigen::Index i = begin; i < end; ++i)
            p.y.row(i) = bickley_flow_map(cfg, x0.row(i).transpose(), t0, cfg.tau).transpose();
    });
    return p;
}

Domain FiveWellConfig::domain() const {
    Domain d;
    d.lo = Eigen::Vector2d(-2.5, -2.5);
    d.hi = Eigen::Vector2d(2.5, 2.5);
    return d;
}

void FiveWellConfig::validate() const {
    if (!(beta > 0.0)) throw InputError(kModule, "FiveWellConfig", "beta must be > 0");
    if (wells < 1) throw InputError(kModule, "FiveWellConfig", "well count must be >= 1");
    if (!(step > 0.0) || !std::isfinite(step))
        throw InputError(kModule, "FiveWellConfig", "step must be > 0");
    if (!(t1 >= t0)) throw InputError(kModule, "FiveWellConfig", "t1 must be >= t0");
}

double five_well_potential(const Eigen::Vector2d& x, double t, int s) {
    const double r = x.norm();
    const double radial = r - 1.5 - 0.5 * std::sin(2.0 * kPi * t);
    return std::cos(s * std::atan2(x(1), x(0)) - 0.5 * kPi * t) + 10.0 * radial * radial;
}

Eigen::Vector2d five_well_grad(const Eigen::Vector2d& x, double t, int s) {
    const double r2 = x.squaredNorm();
    const double r = std::sqrt(r2);
    if (!(r >= 1e-8))
        throw InputError(kModule, "five_well_grad", "potential is not differentiable at the origin");
    const double radial = 20.0 * (r - 1.5 - 0.5 * std::sin(2.0 * kPi * t)) / r;
    // d theta / dx = (-x2, x1) / r^2
    const double angular = -s * std::sin(s * std::atan2(x(1), x(0)) - 0.5 * kPi * t) / r2;
    return {radial * x(0) - angular * x(1), radial * x(1) + angular * x(0)};
}

int five_well_sector(const Eigen::Vector2d& x, double t, int s) {
    const double phase = s * std::atan2(x(1), x(0)) - 0.5 * kPi * t;
    const long idx = static_cast<long>(std::floor(phase / (2.0 * kPi)));
    return static_cast<int>(((idx % s) + s) % s);
}

Eigen::Vector2d euler_maruyama(const FiveWellConfig& cfg, const Eigen::Vector2d& x0,
                               std::uint64_t stream_seed, std::vector<Eigen::Vector2d>* path,
                               long record_stride) {
    cfg.validate();
    if (!x0.allFinite()) throw InputError(kModule, "euler_maruyama", "non-finite initial state");
    if (record_stride < 1) throw InputError(kModule, "euler_maruyama", "record stride must be >= 1");
    const long steps = std::lround((cfg.t1 - cfg.t0) / cfg.step);
    const double h = cfg.step;
    const double noise = std::isinf(cfg.beta) ? 0.0 : std::sqrt(2.0 * h / cfg.beta);
    std::mt19937_64 rng(stream_seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::Vector2d x = x0;
    if (path) path->push_back(x);
    for (long k = 0; k < steps; ++k) {
        const double t = cfg.t0 + static_cast<double>(k) * h;
        x -= h * five_well_grad(x, t, cfg.wells);
        if (noise > 0.0) {
            const double a = normal(rng);
            const double b = normal(rng);
            x += noise * Eigen::Vector2d(a, b);
        }
        if (!(x.norm() <= 1e3))
            throw NumericalError(kModule, "euler_maruyama",
                                 "trajectory diverged (|X| > 1e3); reduce the step size");
        if (path && (k + 1) % record_stride == 0) path->push_back(x);
    }
    return x;
}

TrajectoryPairs five_well_pairs(const FiveWellConfig& cfg, const PointSet& x0) {
    cfg.validate();
    if (x0.cols() != 2) throw InputError(kModule, "five_well_pairs", "points must be 2-D");
    TrajectoryPairs p;
    p.x = x0;
    p.y.resize(x0.rows(), 2);
    p.lag_time = cfg.t1 - cfg.t0;
    p.start_time = cfg.t0;
    parallel_for(x0.rows(), [&](Eigen::Index begin, Eigen::Index end) {
        for (Eigen::Index i = begin; i < end; ++i)
            p.y.row(i) = euler_maruyama(cfg, x0.row(i).transpose(),
                                        split_seed(cfg.seed, static_cast<std::uint64_t>(i)))
                             .transpose();
    });
    return p;
}

std::vector<PointSet> five_well_snapshots(const FiveWellConfig& cfg, const PointSet& x0,
                                          long record_stride) {
    cfg.validate();
    if (x0.cols() != 2) throw InputError(kModule, "five_well_snapshots", "points must be 2-D");
    const long steps = std::lround((cfg.t1 - cfg.t0) / cfg.step);
    const std::size_t count = static_cast<std::size_t>(steps / record_stride) + 1;
    std::vector<PointSet> out(count, PointSet(x0.rows(), 2));
    parallel_for(x0.rows(), [&](Eigen::Index begin, Eigen::Index end) {
        std::vector<Eigen::Vector2d> path;
        for (Eigen::Index i = begin; i < end; ++i) {
            path.clear();
            euler_maruyama(cfg, x0.row(i).transpose(),
                           split_seed(cfg.seed, static_cast<std::uint64_t>(i)), &path,
                           record_stride);
            for (std::size_t j = 0; j < count; ++j) out[j].row(i) = path[j].transpose();
        }
    });
    return out;
}

std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

PointSet sample_uniform(const Domain& domain, Eigen::Index n, std::uint64_t seed) {
    if (n < 1) throw InputError(kModule, "sample_uniform", "n must be >= 1");
    if (domain.lo.size() != domain.hi.size() || domain.lo.size() == 0)
        throw InputError(kModule, "sample_uniform", "malformed domain");
    if (!(domain.hi.array() > domain.lo.array()).all())
        throw InputError(kModule, "sample_uniform", "domain must have positive extent");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    PointSet p(n, domain.dim());
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < domain.dim(); ++j)
            p(i, j) = domain.lo(j) + (domain.hi(j) - domain.lo(j)) * unit(rng);
    return p;
}

TrajectoryPairs superellipse_pairs(Eigen::Index n, std::uint64_t seed, double exponent,
                                   double noise) {
    if (n < 2) throw InputError(kModule, "superellipse_pairs", "n must be >= 2");
    if (!(exponent > 0.0) || !(noise >= 0.0))
        throw InputError(kModule, "superellipse_pairs", "exponent must be > 0, noise >= 0");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    std::normal_distribution<double> normal(0.0, 1.0);
    TrajectoryPairs p;
    p.x.resize(n, 1);
    p.y.resize(n, 1);
    const double q = 2.0 / exponent;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double th = angle(rng);
        const double c = std::cos(th), s = std::sin(th);
        const double ex = normal(rng), ey = normal(rng);
        p.x(i, 0) = std::copysign(std::pow(std::abs(c), q), c) + noise * ex;
        p.y(i, 0) = std::copysign(std::pow(std::abs(s), q), s) + noise * ey;
    }
    return p;
}

}  // namespace kcca
