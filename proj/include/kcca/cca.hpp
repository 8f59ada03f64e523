#pragma once

#include "kcca/data.hpp"
#include "kcca/kernels.hpp"
#include "kcca/linalg.hpp"

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace kcca {

enum class CcaFormulation { GramVariantI, GramVariantII, Generalized, Explicit, WhitenedSvd };

std::string to_string(CcaFormulation f);

/// Which recovery formula produces g-hat from v.
///   (i)  g = (1/rho) Psi (G_YY + n eps I)^{-1} G_XX v
///   (ii) g = (1/rho) Psi (G_YY + n eps I)^{-1} G_XX (G_XX + n eps I)^{-1} v
enum class GRecovery { I, II };

/// Evaluation data for explicit feature maps: f(p) = <coeffs, p - mean>.
struct FeatureView {
    Eigen::VectorXd mean;
};

using EigenfunctionView = std::variant<KernelBasis, FeatureView>;

/// Canonical correlations and eigenfunction pairs (f-hat, g-hat).
///
/// `v` and `w` are the coefficient vectors reported by the chosen
/// formulation; `f_coeffs` and `g_coeffs` expand f-hat and g-hat in the
/// respective view (kernel sections or explicit features) and are what
/// evaluate_eigenfunction uses. For the Gram formulations f_on_X equals v
/// exactly, and evaluating f-hat at x_i reproduces f_on_X(i, j).
struct CcaResult {
    Eigen::VectorXd rho;
    Eigen::VectorXd rho_squared;
    Eigen::MatrixXd v;
    Eigen::MatrixXd w;
    Eigen::MatrixXd f_coeffs;
    Eigen::MatrixXd g_coeffs;
    Eigen::MatrixXd f_on_X;
    Eigen::MatrixXd g_on_Y;
    CcaFormulation formulation = CcaFormulation::GramVariantII;
    double epsilon = 0.0;
    bool centered = true;
    Eigen::Index n = 0;
    EigenfunctionView x_view;
    EigenfunctionView y_view;
    std::vector<std::string> warnings;

    Eigen::Index k() const noexcept { return rho.size(); }
};

struct CcaOptions {
    Eigen::Index k = 10;
    bool centered = true;
    CcaFormulation variant = CcaFormulation::GramVariantII;
    GRecovery g_recovery = GRecovery::II;
    linalg::ProductPath path = linalg::ProductPath::Symmetric;
};

/// Gram-matrix kernel CCA: solves
/// G_XX (G_XX + n eps I)^{-1} (G_YY + n eps I)^{-1} G_YY v = rho^2 v
/// (variant ii, the default) or its variant (i) counterpart. Requires eps > 0.
/// Every returned rho^2 is checked to lie in [0, 1).
CcaResult kernel_cca(const TrajectoryPairs& pairs, const Kernel& kernel_x, const Kernel& kernel_y,
                     const linalg::RegParam& reg, const CcaOptions& options = {});

/// Same problem through the 2n x 2n generalized eigenproblem
/// [0 G_YY; G_XX 0] [v; w] = rho blockdiag(G_XX + n eps I, G_YY + n eps I) [v; w].
CcaResult kernel_cca_generalized(const TrajectoryPairs& pairs, const Kernel& kernel_x,
                                 const Kernel& kernel_y, const linalg::RegParam& reg,
                                 const CcaOptions& options = {});

/// CCA with explicit features (r_x x n and r_y x n, one sample per column).
/// Features are centered here; eps is applied to the 1/n-normalized
/// covariance matrices.
CcaResult explicit_cca(const Eigen::MatrixXd& features_x, const Eigen::MatrixXd& features_y,
                       const linalg::RegParam& reg, Eigen::Index k);

/// Same correlations via the SVD of
/// (C_YY + eps I)^{-1/2} C_YX (C_XX + eps I)^{-1/2}.
CcaResult whitened_svd_cca(const Eigen::MatrixXd& features_x, const Eigen::MatrixXd& features_y,
                           const linalg::RegParam& reg, Eigen::Index k);

enum class Side { F, G };

/// Evaluates f-hat (Side::F, point in the X view) or g-hat (Side::G) number
/// `index` at a point. For explicit results the point is a feature vector.
double evaluate_eigenfunction(const CcaResult& result, Side which, Eigen::Index index,
                              const Eigen::Ref<const Eigen::VectorXd>& point);

/// Vectorized evaluation at many points (rows); returns m x k.
Eigen::MatrixXd evaluate_eigenfunctions(const CcaResult& result, Side which,
                                        const PointSet& points);

/// Writes rho.csv, v.csv, w.csv, f_on_X.csv, g_on_Y.csv and metadata.json.
/// `kernel_spec` is recorded verbatim in the metadata.
void write_cca_result(const CcaResult& result, const std::filesystem::path& dir,
                      const std::string& kernel_spec);

/// Pearson correlation of two equally long vectors.
double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace kcca
