#pragma once

#include "kcca/cca.hpp"
#include "kcca/linalg.hpp"

#include <filesystem>
#include <vector>

namespace kcca {

/// Paired snapshots as columns: X = [x_1 .. x_n], Y = [y_1 .. y_n], both d x n.
struct SnapshotMatrices {
    Eigen::MatrixXd x;
    Eigen::MatrixXd y;

    /// X = [z_s .. z_{m-2}], Y = [z_{s+1} .. z_{m-1}] from a d x m sequence,
    /// dropping the first `skip` snapshots as transient.
    static SnapshotMatrices sequential(const Eigen::MatrixXd& z, Eigen::Index skip = 0);

    Eigen::Index d() const noexcept { return x.rows(); }
    Eigen::Index n() const noexcept { return x.cols(); }
};

struct CmdOptions {
    Eigen::Index k = 10;
    bool centered = false;
};

/// Coherent mode pairs. Column j of xi/eta is the mode pair for rho(j);
/// modes listed in `absent` have numerically zero rho and a zero eta column.
struct CmdResult {
    Eigen::VectorXd rho;
    Eigen::VectorXd rho_squared;
    Eigen::MatrixXd xi;
    Eigen::MatrixXd eta;
    Eigen::MatrixXd v;
    Eigen::MatrixXd w;
    std::vector<Eigen::Index> absent;
    bool centered = false;
    double epsilon = 0.0;
    Eigen::VectorXd mean_x;
    Eigen::VectorXd mean_y;
    /// Wall time of the n x n eigensolve alone.
    double eigensolve_seconds = 0.0;

    Eigen::Index k() const noexcept { return rho.size(); }
};

/// Solves (G_XX + n eps I)^{-1} (G_YY + n eps I)^{-1} G_YY G_XX v = rho^2 v
/// with G_XX = X^T X, G_YY = Y^T Y; xi = X v, w = (1/rho)(G_YY + n eps I)^{-1} G_XX v,
/// eta = Y w. Work beyond forming the Gram matrices and modes is O(n^3).
CmdResult cmd(const SnapshotMatrices& snap, const linalg::RegParam& reg,
              const CmdOptions& options = {});

/// xi_j^T x (Side::F) or eta_j^T y (Side::G); centered results subtract the
/// snapshot mean first.
double evaluate_mode(const CmdResult& result, Side which, Eigen::Index index,
                     const Eigen::Ref<const Eigen::VectorXd>& state);

/// rho.csv, xi.cmdx, eta.cmdx (binary snapshot format) and metadata.json.
void write_cmd_result(const CmdResult& result, const std::filesystem::path& dir);

}  // namespace kcca
