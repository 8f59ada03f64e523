#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace test {

inline std::mt19937_64& rng(std::uint64_t reseed = 0) {
    static std::mt19937_64 g(12345);
    if (reseed) g.seed(reseed);
    return g;
}

inline Eigen::MatrixXd gaussian_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& g) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
        for (Eigen::Index i = 0; i < r; ++i) m(i, j) = nd(g);
    return m;
}

inline Eigen::MatrixXd random_psd(Eigen::Index n, Eigen::Index rank, std::mt19937_64& g) {
    const Eigen::MatrixXd a = gaussian_matrix(n, rank, g);
    return a * a.transpose();
}

inline double uniform(double lo, double hi, std::mt19937_64& g) {
    return std::uniform_real_distribution<double>(lo, hi)(g);
}

/// Eigenvalues via an unrelated dense route (complex Schur through
/// Eigen::ComplexEigenSolver), sorted by descending real part.
inline std::vector<std::complex<double>> reference_spectrum(const Eigen::MatrixXd& m) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m.cast<std::complex<double>>(), false);
    std::vector<std::complex<double>> v(es.eigenvalues().data(),
                                        es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(v.begin(), v.end(), [](auto a, auto b) {
        return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
    });
    return v;
}

/// Symmetric reference eigenvalues, descending.
inline Eigen::VectorXd reference_symmetric(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()),
                                                      Eigen::EigenvaluesOnly);
    return es.eigenvalues().reverse();
}

/// Greedy matching distance between two multisets of complex numbers.
inline double match_distance(std::vector<std::complex<double>> a,
                             std::vector<std::complex<double>> b) {
    if (a.size() != b.size()) return 1e300;
    double worst = 0.0;
    for (const auto& x : a) {
        auto best = b.begin();
        for (auto it = b.begin(); it != b.end(); ++it)
            if (std::abs(*it - x) < std::abs(*best - x)) best = it;
        worst = std::max(worst, std::abs(*best - x));
        b.erase(best);
    }
    return worst;
}

/// |cos| of the angle between two vectors.
inline double abs_cos(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return std::abs(a.dot(b)) / (a.norm() * b.norm());
}

}  // namespace test
