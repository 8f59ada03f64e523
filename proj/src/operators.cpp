#include "kcca/operators.hpp"

#include "kcca/error.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <functional>
#include <ostream>
#include <string>

namespace kcca {

namespace {

constexpr const char* kModule = "operators";

// Relative cutoff below which an eigenvalue of the auxiliary matrix is
// treated as zero.
constexpr double kZeroTol = 1e-9;

Eigen::MatrixXd condition_checked_inverse(const Eigen::MatrixXd& m) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    const double smax = s.size() ? s(0) : 0.0;
    const double smin = s.size() ? s(s.size() - 1) : 0.0;
    if (!(smin > 0.0) || smax / smin > 1e12)
        throw NumericalError(kModule, "perron_frobenius_estimate",
                             "G_XY is ill-conditioned (cond > 1e12); use the variant (ii) "
                             "eigenproblem instead of forming G_XY^{-1}");
    return svd.matrixV() * s.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
}

EigenfunctionSet package(const linalg::SpectralResult& spec, Eigen::Index k,
                         const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& coeffs,
                         const KernelBasis& expansion, Eigenfunction::Basis basis,
                         const char* op) {
    if (k < 0) throw InputError(kModule, op, "requested count must be >= 0");
    EigenfunctionSet out;
    const double scale =
        spec.values.size() ? (spec.values.cwiseAbs() + spec.imag.cwiseAbs()).maxCoeff() : 0.0;
    if (scale == 0.0) {
        out.missing = static_cast<int>(k);
        if (k > 0) out.warnings.push_back("operator has no nonzero eigenvalues");
        return out;
    }
    const Eigen::MatrixXd anchor_gram =
        kernel_matrix(expansion.kernel(), expansion.anchors(), expansion.anchors());
    for (Eigen::Index j = 0; j < spec.values.size() && Eigen::Index(out.functions.size()) < k;
         ++j) {
        const double mag = std::hypot(spec.values(j), spec.imag(j));
        if (mag <= kZeroTol * scale) continue;
        Eigenfunction f;
        f.eigenvalue = spec.values(j);
        f.eigenvalue_imag = spec.imag(j);
        f.coefficients = coeffs(spec.vectors.col(j));
        f.basis = basis;
        f.expansion = expansion;
        f.training_values = anchor_gram * f.coefficients;
        out.functions.push_back(std::move(f));
    }
    out.missing = static_cast<int>(k - static_cast<Eigen::Index>(out.functions.size()));
    if (out.missing > 0)
        out.warnings.push_back(std::to_string(out.missing) +
                               " requested eigenpairs have zero eigenvalue");
    if (spec.complex_count > 0)
        out.warnings.push_back(std::to_string(spec.complex_count) +
                               " eigenvalues have nonzero imaginary part");
    return out;
}

void check_distinct(const Eigen::MatrixXd& gram, std::vector<std::string>& warnings) {
    // Duplicate samples show up as identical Gram rows.
    for (Eigen::Index i = 0; i < gram.rows(); ++i)
        for (Eigen::Index j = i + 1; j < gram.rows(); ++j)
            if ((gram.row(i) - gram.row(j)).cwiseAbs().maxCoeff() == 0.0) {
                warnings.push_back("duplicate samples: features are not linearly independent");
                return;
            }
}

}  // namespace

void TrajectoryPairs::validate(const char* module, const char* operation,
                               Eigen::Index min_n) const {
    if (x.rows() != y.rows())
        throw InputError(module, operation, "X and Y have different sample counts");
    if (x.rows() < min_n)
        throw InputError(module, operation,
                         "need at least " + std::to_string(min_n) + " sample pairs");
    if (!x.allFinite() || !y.allFinite())
        throw InputError(module, operation, "non-finite sample coordinates");
}

EmpiricalOperator::EmpiricalOperator(Eigen::MatrixXd b, PointSet x_data, PointSet y_data,
                                     Kernel kernel_x, Kernel kernel_y, bool roles_swapped)
    : b_(std::move(b)),
      x_(std::move(x_data)),
      y_(std::move(y_data)),
      kx_(std::move(kernel_x)),
      ky_(std::move(kernel_y)),
      swapped_(roles_swapped) {
    if (b_.rows() != b_.cols())
        throw InputError(kModule, "EmpiricalOperator", "B must be square");
    if (x_.rows() != y_.rows() || x_.rows() != b_.rows())
        throw InputError(kModule, "EmpiricalOperator", "B, X and Y sizes disagree");
}

Eigen::MatrixXd EmpiricalOperator::cross_gram() const {
    // Both eigenfunction variants need the inner products <phi(domain_i), psi(range_j)>,
    // which requires a common feature space.
    if (domain_kernel().to_string() != range_kernel().to_string())
        throw InputError(kModule, "cross_gram",
                         "eigendecomposition needs identical kernels for X and Y");
    return kernel_matrix(range_kernel(), domain(), range());
}

double Eigenfunction::operator()(const Eigen::Ref<const Eigen::VectorXd>& point) const {
    const PointSet p = point.transpose();
    return evaluate(p)(0);
}

Eigen::VectorXd Eigenfunction::evaluate(const PointSet& points) const {
    return expansion.evaluate(points, coefficients);
}

EigenfunctionSet op_eig_variant_i(const EmpiricalOperator& op, Eigen::Index k) {
    if (k > op.n()) throw InputError(kModule, "op_eig_variant_i", "k exceeds sample count");
    const Eigen::MatrixXd cross = op.cross_gram();
    const auto spec = linalg::eig_nonsymmetric(op.b() * cross);
    const KernelBasis basis(op.range_kernel(), op.range(), false);
    auto out = package(
        spec, k, [](const Eigen::VectorXd& v) { return v; }, basis, Eigenfunction::Basis::Range,
        "op_eig_variant_i");
    check_distinct(kernel_matrix(op.range_kernel(), op.range(), op.range()), out.warnings);
    return out;
}

EigenfunctionSet op_eig_variant_ii(const EmpiricalOperator& op, Eigen::Index k,
                                   const linalg::RegParam& reg) {
    if (k > op.n()) throw InputError(kModule, "op_eig_variant_ii", "k exceeds sample count");
    const Eigen::MatrixXd cross = op.cross_gram();
    const auto spec = linalg::eig_nonsymmetric(cross * op.b());
    const Eigen::MatrixXd gram_dd = kernel_matrix(op.domain_kernel(), op.domain(), op.domain());
    const KernelBasis basis(op.domain_kernel(), op.domain(), false, gram_dd);
    auto out = package(
        spec, k,
        [&](const Eigen::VectorXd& v) {
            return Eigen::VectorXd(linalg::reg_solve(gram_dd, reg, v, "G_XX"));
        },
        basis, Eigenfunction::Basis::DomainInverseGram, "op_eig_variant_ii");
    check_distinct(gram_dd, out.warnings);
    return out;
}

EmpiricalOperator koopman_estimate(const TrajectoryPairs& pairs, const Kernel& kernel,
                                   const linalg::RegParam& reg) {
    pairs.validate(kModule, "koopman_estimate", 1);
    const Eigen::MatrixXd gxx = gram_matrix(kernel, pairs.x, pairs.x).entries();
    const Eigen::Index n = gxx.rows();
    Eigen::MatrixXd b;
    try {
        b = linalg::reg_solve(gxx, reg, Eigen::MatrixXd::Identity(n, n), "G_XX");
    } catch (const NumericalError& e) {
        throw NumericalError(kModule, "koopman_estimate", e.cause());
    }
    return EmpiricalOperator(std::move(b), pairs.x, pairs.y, kernel, kernel, true);
}

EmpiricalOperator perron_frobenius_estimate(const TrajectoryPairs& pairs, const Kernel& kernel,
                                            const linalg::RegParam& reg) {
    pairs.validate(kModule, "perron_frobenius_estimate", 1);
    const Eigen::MatrixXd gxx = gram_matrix(kernel, pairs.x, pairs.x).entries();
    const Eigen::MatrixXd gxy = kernel_matrix(kernel, pairs.x, pairs.y);
    const Eigen::MatrixXd gxy_inv = condition_checked_inverse(gxy);
    Eigen::MatrixXd b;
    try {
        b = gxy_inv * linalg::reg_solve(gxx, reg, gxy, "G_XX");
    } catch (const NumericalError& e) {
        throw NumericalError(kModule, "perron_frobenius_estimate", e.cause());
    }
    return EmpiricalOperator(std::move(b), pairs.x, pairs.y, kernel, kernel, false);
}

KernelPcaResult kernel_pca(const PointSet& data, const Kernel& kernel, Eigen::Index k) {
    if (data.rows() < 2) throw InputError(kModule, "kernel_pca", "need at least 2 samples");
    if (k < 0 || k > data.rows()) throw InputError(kModule, "kernel_pca", "invalid k");
    const Eigen::Index n = data.rows();
    const GramMatrix raw = gram_matrix(kernel, data, data);
    const GramMatrix centered = center_gram(raw);
    const auto spec = linalg::eig_symmetric(centered.entries() / static_cast<double>(n));

    KernelPcaResult out;
    out.eigenvalues = spec.values.head(k);
    out.eigenvectors = spec.vectors.leftCols(k);
    out.coefficients = Eigen::MatrixXd::Zero(n, k);
    out.projections = Eigen::MatrixXd::Zero(n, k);
    const KernelBasis basis(kernel, data, true, raw.entries());
    const double scale = spec.values.size() ? std::abs(spec.values(0)) : 0.0;
    for (Eigen::Index j = 0; j < k; ++j) {
        const double lambda = out.eigenvalues(j);
        if (lambda > kZeroTol * scale && lambda > 0.0) {
            const double s = std::sqrt(static_cast<double>(n) * lambda);
            out.coefficients.col(j) = out.eigenvectors.col(j) / s;
            out.projections.col(j) = out.eigenvectors.col(j) * s;
        }
        Eigenfunction f;
        f.eigenvalue = lambda;
        f.coefficients = out.coefficients.col(j);
        f.basis = Eigenfunction::Basis::Range;
        f.expansion = basis;
        f.training_values = out.projections.col(j);
        out.functions.push_back(std::move(f));
    }
    return out;
}

void write_eigenfunctions_csv(std::ostream& os, const std::vector<Eigenfunction>& functions) {
    const Eigen::Index n = functions.empty() ? 0 : functions.front().coefficients.size();
    os << "index,eigenvalue";
    for (Eigen::Index i = 1; i <= n; ++i) os << ",coefficient_" << i;
    os << '\n';
    const auto old_precision = os.precision(17);
    for (std::size_t j = 0; j < functions.size(); ++j) {
        os << j << ',' << functions[j].eigenvalue;
        for (Eigen::Index i = 0; i < functions[j].coefficients.size(); ++i)
            os << ',' << functions[j].coefficients(i);
        os << '\n';
    }
    os.precision(old_precision);
}

}  // namespace kcca
