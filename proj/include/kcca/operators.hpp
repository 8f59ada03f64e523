#pragma once

#include "kcca/data.hpp"
#include "kcca/kernels.hpp"
#include "kcca/linalg.hpp"

#include <iosfwd>
#include <vector>

namespace kcca {

/// Finite-rank operator S = Psi B Phi^T between feature spaces, where Phi
/// holds the features of the domain samples and Psi those of the range
/// samples. Transfer-operator estimates fix the coefficient matrix B; the
/// Koopman estimate has the roles of X and Y interchanged (S = Phi B Psi^T).
class EmpiricalOperator {
public:
    EmpiricalOperator(Eigen::MatrixXd b, PointSet x_data, PointSet y_data, Kernel kernel_x,
                      Kernel kernel_y, bool roles_swapped = false);

    const Eigen::MatrixXd& b() const noexcept { return b_; }
    const PointSet& x_data() const noexcept { return x_; }
    const PointSet& y_data() const noexcept { return y_; }
    const Kernel& kernel_x() const noexcept { return kx_; }
    const Kernel& kernel_y() const noexcept { return ky_; }
    bool roles_swapped() const noexcept { return swapped_; }

    /// Samples whose features multiply B from the right (Phi in Psi B Phi^T).
    const PointSet& domain() const noexcept { return swapped_ ? y_ : x_; }
    const Kernel& domain_kernel() const noexcept { return swapped_ ? ky_ : kx_; }
    /// Samples whose features multiply B from the left.
    const PointSet& range() const noexcept { return swapped_ ? x_ : y_; }
    const Kernel& range_kernel() const noexcept { return swapped_ ? kx_ : ky_; }

    Eigen::Index n() const noexcept { return b_.rows(); }

    /// [k(domain_i, range_j)], the cross Gram matrix appearing in both
    /// eigenproblem variants.
    Eigen::MatrixXd cross_gram() const;

private:
    Eigen::MatrixXd b_;
    PointSet x_;
    PointSet y_;
    Kernel kx_;
    Kernel ky_;
    bool swapped_;
};

/// An eigenfunction stored as a kernel expansion over anchor samples, so it
/// can be serialized and evaluated anywhere.
struct Eigenfunction {
    enum class Basis { Range, DomainInverseGram };

    double eigenvalue = 0.0;
    double eigenvalue_imag = 0.0;
    Eigen::VectorXd coefficients;
    Basis basis = Basis::Range;
    KernelBasis expansion;
    /// Values at the anchor samples at construction time.
    Eigen::VectorXd training_values;

    double operator()(const Eigen::Ref<const Eigen::VectorXd>& point) const;
    Eigen::VectorXd evaluate(const PointSet& points) const;
};

struct EigenfunctionSet {
    std::vector<Eigenfunction> functions;
    /// Requested eigenpairs that were unavailable because the corresponding
    /// eigenvalues vanish.
    int missing = 0;
    std::vector<std::string> warnings;
};

/// Variant (i): v eigenvector of B G_cross, phi = Psi v.
EigenfunctionSet op_eig_variant_i(const EmpiricalOperator& op, Eigen::Index k);

/// Variant (ii): v eigenvector of G_cross B, phi = Phi G_dd^{-1} v with the
/// inverse realized by a regularized solve.
EigenfunctionSet op_eig_variant_ii(const EmpiricalOperator& op, Eigen::Index k,
                                   const linalg::RegParam& reg);

/// B = (G_XX + n eps I)^{-1}, with Phi and Psi interchanged.
EmpiricalOperator koopman_estimate(const TrajectoryPairs& pairs, const Kernel& kernel,
                                   const linalg::RegParam& reg);

/// B = G_XY^{-1} (G_XX + n eps I)^{-1} G_XY. Throws NumericalError when
/// cond(G_XY) exceeds 1e12.
EmpiricalOperator perron_frobenius_estimate(const TrajectoryPairs& pairs, const Kernel& kernel,
                                            const linalg::RegParam& reg);

struct KernelPcaResult {
    /// Eigenvalues of (1/n) N0 G N0, nonincreasing.
    Eigen::VectorXd eigenvalues;
    /// Unit-norm eigenvectors of the centered Gram matrix.
    Eigen::MatrixXd eigenvectors;
    /// Expansion coefficients u / sqrt(n lambda); unit RKHS norm.
    Eigen::MatrixXd coefficients;
    /// Principal components of the training data, sqrt(n lambda) u.
    Eigen::MatrixXd projections;
    std::vector<Eigenfunction> functions;
};

KernelPcaResult kernel_pca(const PointSet& data, const Kernel& kernel, Eigen::Index k);

/// CSV with columns index, eigenvalue, coefficient_1..coefficient_n.
void write_eigenfunctions_csv(std::ostream& os, const std::vector<Eigenfunction>& functions);

}  // namespace kcca
