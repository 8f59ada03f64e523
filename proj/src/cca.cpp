#include "kcca/cca.hpp"

#include "kcca/error.hpp"
#include "kcca/io.hpp"

#include <json.hpp>

#include <cmath>

namespace kcca {

namespace {

constexpr const char* kModule = "cca";

// Eigenpairs with rho^2 at or below this are numerically absent; dividing by
// rho would only amplify round-off.
constexpr double kRhoSqFloor = 1e-13;

void check_spectral_range(const Eigen::VectorXd& rho_sq, const char* op, double upper = 1.0) {
    for (Eigen::Index j = 0; j < rho_sq.size(); ++j) {
        const double r = rho_sq(j);
        if (!std::isfinite(r) || r < -1e-10 || r >= upper)
            throw NumericalError(kModule, op,
                                 "rho^2 = " + std::to_string(r) +
                                     " outside [0, 1); inputs violate the PSD/regularization "
                                     "preconditions");
    }
}

void orient_pairs(CcaResult& r) {
    for (Eigen::Index j = 0; j < r.k(); ++j) {
        if (pearson(r.f_on_X.col(j), r.g_on_Y.col(j)) < 0.0) {
            r.w.col(j) *= -1.0;
            r.g_coeffs.col(j) *= -1.0;
            r.g_on_Y.col(j) *= -1.0;
        }
    }
}

struct GramPair {
    Eigen::MatrixXd raw_x;
    Eigen::MatrixXd raw_y;
    Eigen::MatrixXd gx;
    Eigen::MatrixXd gy;
};

GramPair build_grams(const TrajectoryPairs& pairs, const Kernel& kx, const Kernel& ky,
                     bool centered) {
    GramPair g;
    GramMatrix gx = gram_matrix(kx, pairs.x, pairs.x);
    GramMatrix gy = gram_matrix(ky, pairs.y, pairs.y);
    g.raw_x = gx.entries();
    g.raw_y = gy.entries();
    g.gx = centered ? center_gram(gx).entries() : gx.entries();
    g.gy = centered ? center_gram(gy).entries() : gy.entries();
    return g;
}

void check_common(const TrajectoryPairs& pairs, const linalg::RegParam& reg, Eigen::Index k,
                  const char* op) {
    pairs.validate(kModule, op, 2);
    if (!(reg.epsilon > 0.0)) throw InputError(kModule, op, "epsilon must be > 0");
    if (k < 1) throw InputError(kModule, op, "k must be >= 1");
}

/// Keeps the leading pairs with rho^2 above the floor; returns the count.
Eigen::Index usable_count(const Eigen::VectorXd& values, Eigen::Index k,
                          std::vector<std::string>& warnings) {
    Eigen::Index keep = 0;
    const Eigen::Index limit = std::min<Eigen::Index>(k, values.size());
    while (keep < limit && values(keep) > kRhoSqFloor) ++keep;
    if (keep < k)
        warnings.push_back(std::to_string(k - keep) +
                           " requested canonical pairs have zero correlation and were dropped");
    return keep;
}

Eigen::MatrixXd solve_shifted(const Eigen::MatrixXd& g, double shift, const Eigen::MatrixXd& rhs,
                              const char* name) {
    return linalg::reg_solve(g, linalg::RegParam{shift, false}, rhs, name);
}

}  // namespace

std::string to_string(CcaFormulation f) {
    switch (f) {
        case CcaFormulation::GramVariantI: return "gram-variant-i";
        case CcaFormulation::GramVariantII: return "gram-variant-ii";
        case CcaFormulation::Generalized: return "generalized";
        case CcaFormulation::Explicit: return "explicit";
        case CcaFormulation::WhitenedSvd: return "whitened-svd";
    }
    return "unknown";
}

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size() || a.size() < 2)
        throw InputError(kModule, "pearson", "vectors must have equal length >= 2");
    const Eigen::ArrayXd da = a.array() - a.mean();
    const Eigen::ArrayXd db = b.array() - b.mean();
    const double den = std::sqrt((da * da).sum() * (db * db).sum());
    return den > 0.0 ? (da * db).sum() / den : 0.0;
}

CcaResult kernel_cca(const TrajectoryPairs& pairs, const Kernel& kernel_x, const Kernel& kernel_y,
                     const linalg::RegParam& reg, const CcaOptions& options) {
    check_common(pairs, reg, options.k, "kernel_cca");
    if (options.variant != CcaFormulation::GramVariantI &&
        options.variant != CcaFormulation::GramVariantII)
        throw InputError(kModule, "kernel_cca", "variant must be gram-variant-i or -ii");

    const Eigen::Index n = pairs.size();
    const double shift = static_cast<double>(n) * reg.epsilon;
    const GramPair g = build_grams(pairs, kernel_x, kernel_y, options.centered);

    CcaResult r;
    r.formulation = options.variant;
    r.epsilon = reg.epsilon;
    r.centered = options.centered;
    r.n = n;
    r.x_view = KernelBasis(kernel_x, pairs.x, options.centered, g.raw_x);
    r.y_view = KernelBasis(kernel_y, pairs.y, options.centered, g.raw_y);

    linalg::SpectralResult spec;
    if (options.variant == CcaFormulation::GramVariantI &&
        options.path == linalg::ProductPath::Nonsymmetric) {
        // (G_XX + c)^{-1} (G_YY + c)^{-1} G_YY G_XX
        const Eigen::MatrixXd m =
            solve_shifted(g.gx, shift, solve_shifted(g.gy, shift, g.gy * g.gx, "G_YY"), "G_XX");
        spec = linalg::eig_nonsymmetric(m);
    } else {
        spec = linalg::psd_product_eig(g.gx, g.gy, shift, options.path);
    }
    check_spectral_range(spec.values.head(std::min(options.k, n)), "kernel_cca");

    const Eigen::Index k = usable_count(spec.values, options.k, r.warnings);
    r.rho_squared = spec.values.head(k);
    r.rho = r.rho_squared.cwiseSqrt();

    Eigen::MatrixXd v = spec.vectors.leftCols(k);
    if (options.variant == CcaFormulation::GramVariantI &&
        options.path == linalg::ProductPath::Symmetric) {
        // From a variant (ii) eigenvector v2, (G_XX + c)^{-1} B v2 with
        // B = (G_YY + c)^{-1} G_YY is the variant (i) eigenvector.
        v = solve_shifted(g.gx, shift, solve_shifted(g.gy, shift, g.gy * v, "G_YY"), "G_XX");
        for (Eigen::Index j = 0; j < k; ++j) {
            v.col(j).normalize();
            linalg::fix_sign(v.col(j));
        }
    }
    r.v = v;

    const Eigen::VectorXd inv_rho = r.rho.cwiseInverse();
    if (options.variant == CcaFormulation::GramVariantII) {
        // f = Phi G_XX^{-1} v, realized as the variant (i) coefficients
        // B v / rho^2, whose training evaluation G_XX B v / rho^2 is v.
        const Eigen::MatrixXd bv =
            solve_shifted(g.gx, shift, solve_shifted(g.gy, shift, g.gy * v, "G_YY"), "G_XX");
        r.f_coeffs = bv * r.rho_squared.cwiseInverse().asDiagonal();
        r.f_on_X = v;
    } else {
        r.f_coeffs = v;
        r.f_on_X = g.gx * v;
    }

    Eigen::MatrixXd gv = g.gx * v;
    if (options.g_recovery == GRecovery::II) gv = g.gx * solve_shifted(g.gx, shift, v, "G_XX");
    r.w = solve_shifted(g.gy, shift, gv, "G_YY") * inv_rho.asDiagonal();
    r.g_coeffs = r.w;
    r.g_on_Y = g.gy * r.w;
    orient_pairs(r);
    return r;
}

CcaResult kernel_cca_generalized(const TrajectoryPairs& pairs, const Kernel& kernel_x,
                                 const Kernel& kernel_y, const linalg::RegParam& reg,
                                 const CcaOptions& options) {
    check_common(pairs, reg, options.k, "kernel_cca_generalized");
    const Eigen::Index n = pairs.size();
    const double shift = static_cast<double>(n) * reg.epsilon;
    const GramPair g = build_grams(pairs, kernel_x, kernel_y, options.centered);

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    a.topRightCorner(n, n) = g.gy;
    a.bottomLeftCorner(n, n) = g.gx;
    b.topLeftCorner(n, n) = g.gx;
    b.topLeftCorner(n, n).diagonal().array() += shift;
    b.bottomRightCorner(n, n) = g.gy;
    b.bottomRightCorner(n, n).diagonal().array() += shift;

    linalg::SpectralResult spec;
    try {
        spec = linalg::generalized_eig(a, b);
    } catch (const NumericalError& e) {
        throw NumericalError(kModule, "kernel_cca_generalized", e.cause());
    }

    CcaResult r;
    r.formulation = CcaFormulation::Generalized;
    r.epsilon = reg.epsilon;
    r.centered = options.centered;
    r.n = n;
    r.x_view = KernelBasis(kernel_x, pairs.x, options.centered, g.raw_x);
    r.y_view = KernelBasis(kernel_y, pairs.y, options.centered, g.raw_y);

    // The spectrum is {+rho_j, -rho_j, 0...}; the leading entries are the +rho.
    const Eigen::Index limit = std::min(options.k, n);
    Eigen::VectorXd rho_sq = spec.values.head(limit).cwiseMax(0.0).array().square();
    check_spectral_range(rho_sq, "kernel_cca_generalized");
    const Eigen::Index k = usable_count(rho_sq, options.k, r.warnings);
    r.rho = spec.values.head(k);
    r.rho_squared = rho_sq.head(k);
    r.v.resize(n, k);
    r.w.resize(n, k);
    for (Eigen::Index j = 0; j < k; ++j) {
        Eigen::VectorXd x = spec.vectors.col(j);
        const double vn = x.head(n).norm();
        if (vn > 0.0) x /= vn;
        Eigen::Index imax = 0;
        x.head(n).cwiseAbs().maxCoeff(&imax);
        if (x(imax) < 0.0) x = -x;
        r.v.col(j) = x.head(n);
        r.w.col(j) = x.tail(n);
    }
    r.f_coeffs = r.v;
    r.g_coeffs = r.w;
    r.f_on_X = g.gx * r.v;
    r.g_on_Y = g.gy * r.w;
    orient_pairs(r);
    return r;
}

namespace {

struct Covariances {
    Eigen::VectorXd mean_x, mean_y;
    Eigen::MatrixXd phi, psi;  // centered features
    Eigen::MatrixXd cxx, cyy, cyx;
};

Covariances covariances(const Eigen::MatrixXd& fx, const Eigen::MatrixXd& fy, const char* op) {
    if (fx.cols() != fy.cols())
        throw InputError(kModule, op, "feature matrices have different sample counts");
    if (fx.cols() < 2) throw InputError(kModule, op, "need at least 2 samples");
    if (!fx.allFinite() || !fy.allFinite()) throw InputError(kModule, op, "non-finite features");
    Covariances c;
    const double n = static_cast<double>(fx.cols());
    c.mean_x = fx.rowwise().mean();
    c.mean_y = fy.rowwise().mean();
    c.phi = fx.colwise() - c.mean_x;
    c.psi = fy.colwise() - c.mean_y;
    c.cxx = c.phi * c.phi.transpose() / n;
    c.cyy = c.psi * c.psi.transpose() / n;
    c.cyx = c.psi * c.phi.transpose() / n;
    return c;
}

[[noreturn]] void rethrow_rank_deficient(const char* op) {
    throw NumericalError(kModule, op,
                         "covariance matrix is singular; use epsilon > 0 or remove redundant "
                         "basis functions");
}

}  // namespace

CcaResult explicit_cca(const Eigen::MatrixXd& features_x, const Eigen::MatrixXd& features_y,
                       const linalg::RegParam& reg, Eigen::Index k) {
    const Covariances c = covariances(features_x, features_y, "explicit_cca");
    if (reg.epsilon < 0.0) throw InputError(kModule, "explicit_cca", "epsilon must be >= 0");
    if (k < 1 || k > c.cxx.rows()) throw InputError(kModule, "explicit_cca", "invalid k");
    const linalg::RegParam cov_reg{reg.epsilon, false};

    Eigen::MatrixXd m, cyy_inv_cyx;
    try {
        cyy_inv_cyx = linalg::reg_solve(c.cyy, cov_reg, c.cyx, "C_YY");
        m = linalg::reg_solve(c.cxx, cov_reg, c.cyx.transpose() * cyy_inv_cyx, "C_XX");
    } catch (const NumericalError&) {
        rethrow_rank_deficient("explicit_cca");
    }
    const auto spec = linalg::eig_nonsymmetric(m);

    CcaResult r;
    r.formulation = CcaFormulation::Explicit;
    r.epsilon = reg.epsilon;
    r.centered = true;
    r.n = features_x.cols();
    r.x_view = FeatureView{c.mean_x};
    r.y_view = FeatureView{c.mean_y};

    Eigen::VectorXd values = spec.values.head(k);
    if (reg.epsilon > 0.0) {
        check_spectral_range(values, "explicit_cca");
    } else {
        check_spectral_range(values, "explicit_cca", 1.0 + 1e-8);
        values = values.cwiseMin(1.0);
    }
    const Eigen::Index kk = usable_count(values.cwiseMax(0.0), k, r.warnings);
    r.rho_squared = values.head(kk).cwiseMax(0.0);
    r.rho = r.rho_squared.cwiseSqrt();
    r.v = spec.vectors.leftCols(kk);
    r.w = cyy_inv_cyx * r.v * r.rho.cwiseInverse().asDiagonal();
    r.f_coeffs = r.v;
    r.g_coeffs = r.w;
    r.f_on_X = c.phi.transpose() * r.v;
    r.g_on_Y = c.psi.transpose() * r.w;
    orient_pairs(r);
    return r;
}

CcaResult whitened_svd_cca(const Eigen::MatrixXd& features_x, const Eigen::MatrixXd& features_y,
                           const linalg::RegParam& reg, Eigen::Index k) {
    const Covariances c = covariances(features_x, features_y, "whitened_svd_cca");
    if (reg.epsilon < 0.0) throw InputError(kModule, "whitened_svd_cca", "epsilon must be >= 0");
    if (k < 1 || k > std::min(c.cxx.rows(), c.cyy.rows()))
        throw InputError(kModule, "whitened_svd_cca", "invalid k");
    const linalg::RegParam cov_reg{reg.epsilon, false};

    Eigen::MatrixXd wx, wy;
    try {
        wx = linalg::inv_sqrt_psd(c.cxx, cov_reg);
        wy = linalg::inv_sqrt_psd(c.cyy, cov_reg);
    } catch (const NumericalError&) {
        rethrow_rank_deficient("whitened_svd_cca");
    }
    const auto svd = linalg::svd_trunc(wy * c.cyx * wx, k);

    CcaResult r;
    r.formulation = CcaFormulation::WhitenedSvd;
    r.epsilon = reg.epsilon;
    r.centered = true;
    r.n = features_x.cols();
    r.x_view = FeatureView{c.mean_x};
    r.y_view = FeatureView{c.mean_y};

    Eigen::VectorXd rho = svd.sigma;
    if (reg.epsilon > 0.0) {
        check_spectral_range(rho.array().square(), "whitened_svd_cca");
    } else {
        check_spectral_range(rho.array().square(), "whitened_svd_cca", 1.0 + 1e-8);
        rho = rho.cwiseMin(1.0);
    }
    const Eigen::Index kk = usable_count(rho.array().square(), k, r.warnings);
    r.rho = rho.head(kk);
    r.rho_squared = r.rho.array().square();
    r.v = wx * svd.v.leftCols(kk);
    r.w = wy * svd.u.leftCols(kk);
    for (Eigen::Index j = 0; j < kk; ++j) {
        const double s = r.v.col(j).norm();
        r.v.col(j) /= s;
        r.w.col(j) /= s;
        Eigen::Index imax = 0;
        r.v.col(j).cwiseAbs().maxCoeff(&imax);
        if (r.v(imax, j) < 0.0) {
            r.v.col(j) *= -1.0;
            r.w.col(j) *= -1.0;
        }
    }
    r.f_coeffs = r.v;
    r.g_coeffs = r.w;
    r.f_on_X = c.phi.transpose() * r.v;
    r.g_on_Y = c.psi.transpose() * r.w;
    orient_pairs(r);
    return r;
}

Eigen::MatrixXd evaluate_eigenfunctions(const CcaResult& result, Side which,
                                        const PointSet& points) {
    const auto& view = which == Side::F ? result.x_view : result.y_view;
    const auto& coeffs = which == Side::F ? result.f_coeffs : result.g_coeffs;
    if (const auto* basis = std::get_if<KernelBasis>(&view)) {
        if (points.cols() != basis->anchors().cols())
            throw InputError(kModule, "evaluate_eigenfunction", "point dimension mismatch");
        return basis->evaluate(points, coeffs);
    }
    const auto& fv = std::get<FeatureView>(view);
    if (points.cols() != fv.mean.size())
        throw InputError(kModule, "evaluate_eigenfunction", "feature dimension mismatch");
    return (points.rowwise() - fv.mean.transpose()) * coeffs;
}

double evaluate_eigenfunction(const CcaResult& result, Side which, Eigen::Index index,
                              const Eigen::Ref<const Eigen::VectorXd>& point) {
    if (index < 0 || index >= result.k())
        throw InputError(kModule, "evaluate_eigenfunction", "eigenfunction index out of range");
    const PointSet p = point.transpose();
    return evaluate_eigenfunctions(result, which, p)(0, index);
}

void write_cca_result(const CcaResult& result, const std::filesystem::path& dir,
                      const std::string& kernel_spec) {
    std::filesystem::create_directories(dir);
    io::write_vector_csv(dir / "rho.csv", result.rho, "rho");
    io::write_matrix_csv(dir / "v.csv", result.v);
    io::write_matrix_csv(dir / "w.csv", result.w);
    io::write_matrix_csv(dir / "f_on_X.csv", result.f_on_X);
    io::write_matrix_csv(dir / "g_on_Y.csv", result.g_on_Y);
    nlohmann::ordered_json meta;
    meta["kernel"] = kernel_spec;
    meta["epsilon"] = result.epsilon;
    meta["n"] = result.n;
    meta["k"] = result.k();
    meta["formulation"] = to_string(result.formulation);
    meta["centered"] = result.centered;
    meta["warnings"] = result.warnings;
    io::write_text(dir / "metadata.json", meta.dump(2) + "\n");
}

}  // namespace kcca
