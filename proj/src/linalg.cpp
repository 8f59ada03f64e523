#include "kcca/linalg.hpp"

#include "kcca/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace kcca::linalg {

namespace {

constexpr const char* kModule = "linalg";

bool all_finite(const MatrixXd& m) { return m.allFinite(); }

// Power iteration on M^T M; close enough for tolerance scaling.
double spectral_norm_estimate(const MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    if (m.rows() <= 64 && m.cols() <= 64) {
        Eigen::JacobiSVD<MatrixXd> svd(m);
        return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    }
    VectorXd x = VectorXd::Ones(m.cols()) / std::sqrt(static_cast<double>(m.cols()));
    double norm = 0.0;
    for (int it = 0; it < 60; ++it) {
        VectorXd y = m.transpose() * (m * x);
        const double ny = y.norm();
        if (ny == 0.0) return 0.0;
        x = y / ny;
        norm = std::sqrt(ny);
    }
    return norm;
}

void normalize_columns(MatrixXd& v) {
    for (Index j = 0; j < v.cols(); ++j) {
        const double n = v.col(j).norm();
        if (n > 0.0) v.col(j) /= n;
        fix_sign(v.col(j));
    }
}

std::vector<Index> descending_order(const VectorXd& re, const VectorXd& im) {
    std::vector<Index> order(static_cast<std::size_t>(re.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        if (re(a) != re(b)) return re(a) > re(b);
        return im(a) > im(b);
    });
    return order;
}

}  // namespace

void fix_sign(Eigen::Ref<VectorXd> v) {
    if (v.size() == 0) return;
    Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v(imax) < 0.0) v = -v;
}

MatrixXd reg_solve(const MatrixXd& a, const RegParam& reg, const MatrixXd& b,
                   std::string_view name) {
    if (a.rows() != a.cols() || a.rows() != b.rows())
        throw InputError(kModule, "reg_solve", "shape mismatch for " + std::string(name));
    if (reg.epsilon < 0.0) throw InputError(kModule, "reg_solve", "epsilon must be >= 0");
    if (!all_finite(a) || !all_finite(b))
        throw InputError(kModule, "reg_solve", "non-finite entries in " + std::string(name));
    MatrixXd shifted = a;
    shifted.diagonal().array() += reg.shift(a.rows());
    Eigen::LLT<MatrixXd> llt(shifted);
    if (llt.info() != Eigen::Success)
        throw NumericalError(kModule, "reg_solve",
                             "Cholesky factorization of " + std::string(name) +
                                 " + shift*I failed (matrix indefinite or singular)");
    MatrixXd x = llt.solve(b);
    // Backward error relative to |A||x| + |b|; Cholesky keeps it near n*u, so
    // a large value or a reciprocal condition below 1e-15 means the shifted
    // matrix is singular at working precision.
    const double resid = (shifted * x - b).norm();
    const double scale = shifted.norm() * x.norm() + b.norm();
    if (!x.allFinite() || llt.rcond() < 1e-15 || resid > 1e-10 * scale)
        throw NumericalError(kModule, "reg_solve",
                             "solve with " + std::string(name) + " is numerically singular");
    return x;
}

SpectralResult eig_nonsymmetric(const MatrixXd& m) {
    if (m.rows() != m.cols()) throw InputError(kModule, "eig_nonsymmetric", "matrix not square");
    if (!all_finite(m)) throw InputError(kModule, "eig_nonsymmetric", "non-finite entries");
    const Index n = m.rows();
    SpectralResult out;
    if (n == 0) return out;

    Eigen::EigenSolver<MatrixXd> es(m, true);
    if (es.info() != Eigen::Success)
        throw NumericalError(kModule, "eig_nonsymmetric", "eigensolver did not converge");

    const Eigen::VectorXcd lambda = es.eigenvalues();
    const Eigen::MatrixXcd vecs = es.eigenvectors();
    const VectorXd re = lambda.real();
    const VectorXd im = lambda.imag();
    const auto order = descending_order(re, im);
    const double mnorm = spectral_norm_estimate(m);

    out.values.resize(n);
    out.imag.resize(n);
    out.vectors.resize(n, n);
    for (Index j = 0; j < n; ++j) {
        const Index src = order[static_cast<std::size_t>(j)];
        out.values(j) = re(src);
        out.imag(j) = im(src);
        out.vectors.col(j) = vecs.col(src).real();
        const bool is_complex = std::abs(im(src)) > 1e-8 * std::abs(lambda(src)) + 1e-10 * mnorm;
        if (is_complex) {
            ++out.complex_count;
            continue;
        }
        const double resid = (m * vecs.col(src) - lambda(src) * vecs.col(src)).norm() /
                             std::max(vecs.col(src).norm(), 1e-300);
        if (resid > 1e-6 * std::max(mnorm, 1e-300))
            throw NumericalError(kModule, "eig_nonsymmetric",
                                 "eigenpair residual " + std::to_string(resid) + " too large");
    }
    normalize_columns(out.vectors);
    return out;
}

SpectralResult eig_symmetric(const MatrixXd& s) {
    if (s.rows() != s.cols()) throw InputError(kModule, "eig_symmetric", "matrix not square");
    if (!all_finite(s)) throw InputError(kModule, "eig_symmetric", "non-finite entries");
    const MatrixXd sym = 0.5 * (s + s.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym);
    if (es.info() != Eigen::Success)
        throw NumericalError(kModule, "eig_symmetric", "eigensolver did not converge");
    const Index n = s.rows();
    SpectralResult out;
    // Eigen sorts ascending.
    out.values = es.eigenvalues().reverse();
    out.imag = VectorXd::Zero(n);
    out.vectors = es.eigenvectors().rowwise().reverse();
    normalize_columns(out.vectors);
    return out;
}

SpectralResult generalized_eig(const MatrixXd& a, const MatrixXd& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
        throw InputError(kModule, "generalized_eig", "shape mismatch");
    if (!all_finite(a) || !all_finite(b))
        throw InputError(kModule, "generalized_eig", "non-finite entries");
    const MatrixXd bsym = 0.5 * (b + b.transpose());
    Eigen::LLT<MatrixXd> llt(bsym);
    if (llt.info() != Eigen::Success)
        throw NumericalError(kModule, "generalized_eig", "B is not positive definite");
    const auto lower = llt.matrixL();
    // C = L^{-1} A L^{-T}
    MatrixXd c = lower.solve(a);
    c = lower.solve(c.transpose()).transpose();
    SpectralResult red = eig_nonsymmetric(c);
    // x = L^{-T} y
    red.vectors = llt.matrixU().solve(red.vectors);
    normalize_columns(red.vectors);

    const double scale = spectral_norm_estimate(a) + spectral_norm_estimate(bsym);
    for (Index j = 0; j < red.values.size(); ++j) {
        if (std::abs(red.imag(j)) > 1e-8 * std::abs(red.values(j)) + 1e-14 * scale) continue;
        const auto x = red.vectors.col(j);
        const double resid = (a * x - red.values(j) * (bsym * x)).norm();
        if (resid > 1e-6 * scale)
            throw NumericalError(kModule, "generalized_eig",
                                 "eigenpair residual " + std::to_string(resid) + " too large");
    }
    return red;
}

PsdSpectrum::PsdSpectrum(const MatrixXd& a, std::string_view name) {
    if (a.rows() != a.cols())
        throw InputError(kModule, "PsdSpectrum", std::string(name) + " not square");
    if (!all_finite(a))
        throw InputError(kModule, "PsdSpectrum", std::string(name) + " has non-finite entries");
    const MatrixXd sym = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym);
    if (es.info() != Eigen::Success)
        throw NumericalError(kModule, "PsdSpectrum",
                             "eigensolver did not converge for " + std::string(name));
    values_ = es.eigenvalues();
    vectors_ = es.eigenvectors();
    const double norm = values_.size() ? values_.cwiseAbs().maxCoeff() : 0.0;
    for (Index i = 0; i < values_.size(); ++i) {
        if (values_(i) < -1e-8 * norm)
            throw NumericalError(kModule, "PsdSpectrum",
                                 std::string(name) + " has negative eigenvalue " +
                                     std::to_string(values_(i)));
        values_(i) = std::max(values_(i), 0.0);
    }
}

MatrixXd inv_sqrt_psd(const MatrixXd& a, const RegParam& reg) {
    if (reg.epsilon < 0.0) throw InputError(kModule, "inv_sqrt_psd", "epsilon must be >= 0");
    const PsdSpectrum spec(a, "A");
    const double shift = reg.shift(a.rows());
    const double norm = spec.eigenvalues().size() ? spec.eigenvalues().maxCoeff() : 0.0;
    for (Index i = 0; i < spec.eigenvalues().size(); ++i)
        if (spec.eigenvalues()(i) + shift <= 1e-14 * std::max(norm, 1.0))
            throw NumericalError(kModule, "inv_sqrt_psd",
                                 "A + shift*I is singular; use epsilon > 0");
    return spec.apply([shift](double d) { return 1.0 / std::sqrt(d + shift); });
}

TruncatedSvd svd_trunc(const MatrixXd& m, Index k) {
    if (!all_finite(m)) throw InputError(kModule, "svd_trunc", "non-finite entries");
    if (k < 0 || k > std::min(m.rows(), m.cols()))
        throw InputError(kModule, "svd_trunc", "rank exceeds min(rows, cols)");
    Eigen::BDCSVD<MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    TruncatedSvd out;
    out.sigma = svd.singularValues().head(k);
    out.u = svd.matrixU().leftCols(k);
    out.v = svd.matrixV().leftCols(k);
    for (Index j = 0; j < k; ++j) {
        Index imax = 0;
        out.v.col(j).cwiseAbs().maxCoeff(&imax);
        if (out.v(imax, j) < 0.0) {
            out.v.col(j) = -out.v.col(j);
            out.u.col(j) = -out.u.col(j);
        }
    }
    return out;
}

SpectralResult psd_product_eig(const MatrixXd& g, const MatrixXd& h, double shift,
                               ProductPath path) {
    if (g.rows() != g.cols() || h.rows() != h.cols() || g.rows() != h.rows())
        throw InputError(kModule, "psd_product_eig", "shape mismatch");
    if (!(shift > 0.0))
        throw InputError(kModule, "psd_product_eig", "regularization shift must be positive");

    if (path == ProductPath::Nonsymmetric) {
        const RegParam reg{shift, false};
        const MatrixXd m = g * reg_solve(g, reg, reg_solve(h, reg, h, "G_YY"), "G_XX");
        return eig_nonsymmetric(m);
    }

    const PsdSpectrum sg(g, "G_XX");
    const PsdSpectrum sh(h, "G_YY");
    const MatrixXd a_half = sg.apply([shift](double d) { return std::sqrt(d / (d + shift)); });
    const MatrixXd b = sh.apply([shift](double d) { return d / (d + shift); });
    const MatrixXd s = a_half * b * a_half;
    SpectralResult out = eig_symmetric(s);
    out.vectors = a_half * out.vectors;
    for (Index j = 0; j < out.values.size(); ++j) out.values(j) = std::max(out.values(j), 0.0);
    normalize_columns(out.vectors);
    return out;
}

}  // namespace kcca::linalg
