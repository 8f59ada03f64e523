#pragma once

#include <Eigen/Dense>

#include <string_view>

namespace kcca::linalg {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Tikhonov parameter. Gram-side solvers shift by n*epsilon (scale_by_n),
/// covariance-side solvers by epsilon.
struct RegParam {
    double epsilon = 0.0;
    bool scale_by_n = true;

    double shift(Index n) const { return scale_by_n ? static_cast<double>(n) * epsilon : epsilon; }
};

/// Eigenpairs sorted by nonincreasing real part. Vectors have unit norm and
/// their largest-magnitude component is positive. `imag` holds imaginary
/// parts (all zero for symmetric problems); `complex_count` counts pairs whose
/// imaginary part exceeds 1e-8 |lambda|.
struct SpectralResult {
    VectorXd values;
    VectorXd imag;
    MatrixXd vectors;
    int complex_count = 0;
};

/// Flips the sign of v so that its largest-magnitude entry is positive.
void fix_sign(Eigen::Ref<VectorXd> v);

/// (A + shift I)^{-1} B via Cholesky. `name` labels A in error messages.
MatrixXd reg_solve(const MatrixXd& a, const RegParam& reg, const MatrixXd& b,
                   std::string_view name = "A");

/// Dense real eigensolver for a general square matrix.
SpectralResult eig_nonsymmetric(const MatrixXd& m);

/// Dense symmetric eigensolver; input is symmetrized first.
SpectralResult eig_symmetric(const MatrixXd& s);

/// A x = rho B x for symmetric positive definite B, reduced through the
/// Cholesky factor of B. Eigenvectors are returned B-orthonormalized per
/// column only up to the unit-norm convention of SpectralResult.
SpectralResult generalized_eig(const MatrixXd& a, const MatrixXd& b);

/// (A + shift I)^{-1/2} by eigendecomposition of the symmetric PSD A.
MatrixXd inv_sqrt_psd(const MatrixXd& a, const RegParam& reg);

struct TruncatedSvd {
    MatrixXd u;
    VectorXd sigma;
    MatrixXd v;
};

/// Leading k singular triplets, sigma nonincreasing. Sign of each pair fixed
/// by the right singular vector.
TruncatedSvd svd_trunc(const MatrixXd& m, Index k);

/// Spectral decomposition of a symmetric PSD matrix with a helper to build
/// matrix functions U f(D) U^T. Negative eigenvalues above -tol*||A|| are
/// clipped to zero; larger ones raise NumericalError.
class PsdSpectrum {
public:
    PsdSpectrum(const MatrixXd& a, std::string_view name);

    const VectorXd& eigenvalues() const noexcept { return values_; }
    const MatrixXd& eigenvectors() const noexcept { return vectors_; }

    template <class F>
    MatrixXd apply(F&& f) const {
        VectorXd d(values_.size());
        for (Index i = 0; i < values_.size(); ++i) d(i) = f(values_(i));
        return vectors_ * d.asDiagonal() * vectors_.transpose();
    }

private:
    VectorXd values_;
    MatrixXd vectors_;
};

/// Which algebraic route solves the PSD-product eigenproblem.
enum class ProductPath { Symmetric, Nonsymmetric };

/// Eigenpairs of G (G + cI)^{-1} (H + cI)^{-1} H for symmetric PSD G, H and
/// c > 0. The symmetric path whitens with A^{1/2}, A = G (G + cI)^{-1}, and
/// diagonalizes A^{1/2} B A^{1/2}, B = (H + cI)^{-1} H; eigenvectors are
/// mapped back as v = A^{1/2} u. Both paths return the same pairs.
SpectralResult psd_product_eig(const MatrixXd& g, const MatrixXd& h, double shift,
                               ProductPath path = ProductPath::Symmetric);

}  // namespace kcca::linalg
