#include "kcca/cmd.hpp"

#include "kcca/error.hpp"
#include "kcca/io.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>

namespace kcca {

namespace {

constexpr const char* kModule = "cmd";
constexpr double kRhoSqFloor = 1e-13;

Eigen::MatrixXd shifted_solve(const Eigen::MatrixXd& g, double shift, const Eigen::MatrixXd& rhs,
                              const char* name) {
    try {
        return linalg::reg_solve(g, linalg::RegParam{shift, false}, rhs, name);
    } catch (const NumericalError& e) {
        throw NumericalError(kModule, "cmd", e.cause());
    }
}

}  // namespace

SnapshotMatrices SnapshotMatrices::sequential(const Eigen::MatrixXd& z, Eigen::Index skip) {
    if (skip < 0) throw InputError(kModule, "sequential", "skip count must be >= 0");
    if (z.cols() - skip < 3)
        throw InputError(kModule, "sequential", "need at least 3 snapshots after the skip");
    const Eigen::Index n = z.cols() - skip - 1;
    return SnapshotMatrices{z.middleCols(skip, n), z.middleCols(skip + 1, n)};
}

CmdResult cmd(const SnapshotMatrices& snap, const linalg::RegParam& reg,
              const CmdOptions& options) {
    if (snap.x.rows() != snap.y.rows() || snap.x.cols() != snap.y.cols())
        throw InputError(kModule, "cmd", "X and Y must have identical shapes");
    if (snap.n() < 2) throw InputError(kModule, "cmd", "need at least 2 snapshot pairs");
    if (snap.d() < 1) throw InputError(kModule, "cmd", "snapshot dimension must be >= 1");
    if (!(reg.epsilon > 0.0)) throw InputError(kModule, "cmd", "epsilon must be > 0");
    if (options.k < 1) throw InputError(kModule, "cmd", "k must be >= 1");
    if (!snap.x.allFinite() || !snap.y.allFinite())
        throw InputError(kModule, "cmd", "non-finite snapshot entries");

    const Eigen::Index n = snap.n();
    const double shift = static_cast<double>(n) * reg.epsilon;

    CmdResult r;
    r.centered = options.centered;
    r.epsilon = reg.epsilon;
    r.mean_x = Eigen::VectorXd::Zero(snap.d());
    r.mean_y = Eigen::VectorXd::Zero(snap.d());
    Eigen::MatrixXd xc, yc;
    if (options.centered) {
        r.mean_x = snap.x.rowwise().mean();
        r.mean_y = snap.y.rowwise().mean();
        xc = snap.x.colwise() - r.mean_x;
        yc = snap.y.colwise() - r.mean_y;
    }
    const Eigen::MatrixXd& x = options.centered ? xc : snap.x;
    const Eigen::MatrixXd& y = options.centered ? yc : snap.y;

    Eigen::MatrixXd g(n, n), h(n, n);
    g.noalias() = x.transpose() * x;
    h.noalias() = y.transpose() * y;

    const auto t0 = std::chrono::steady_clock::now();
    const auto spec = linalg::psd_product_eig(g, h, shift, linalg::ProductPath::Symmetric);
    const Eigen::Index k = std::min(options.k, n);
    for (Eigen::Index j = 0; j < k; ++j)
        if (!std::isfinite(spec.values(j)) || spec.values(j) >= 1.0 || spec.values(j) < -1e-10)
            throw NumericalError(kModule, "cmd", "rho^2 outside [0, 1)");
    // Map eigenvectors of the symmetric form to (G + c)^{-1} (H + c)^{-1} H G.
    Eigen::MatrixXd v = shifted_solve(
        g, shift, shifted_solve(h, shift, h * spec.vectors.leftCols(k), "G_YY"), "G_XX");
    r.eigensolve_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    for (Eigen::Index j = 0; j < k; ++j) {
        v.col(j).normalize();
        linalg::fix_sign(v.col(j));
    }
    r.rho_squared = spec.values.head(k).cwiseMax(0.0);
    r.rho = r.rho_squared.cwiseSqrt();
    r.v = v;

    const Eigen::MatrixXd gw = shifted_solve(h, shift, g * v, "G_YY");
    r.w = Eigen::MatrixXd::Zero(n, k);
    for (Eigen::Index j = 0; j < k; ++j) {
        if (r.rho_squared(j) <= kRhoSqFloor) {
            r.absent.push_back(j);
            continue;
        }
        r.w.col(j) = gw.col(j) / r.rho(j);
        const Eigen::VectorXd fx = g * v.col(j);
        const Eigen::VectorXd gy = h * r.w.col(j);
        if (fx.dot(gy) < 0.0) r.w.col(j) *= -1.0;
    }
    r.xi = x * v;
    r.eta = y * r.w;
    return r;
}

double evaluate_mode(const CmdResult& result, Side which, Eigen::Index index,
                     const Eigen::Ref<const Eigen::VectorXd>& state) {
    if (index < 0 || index >= result.k())
        throw InputError(kModule, "evaluate_mode", "mode index out of range");
    const auto& modes = which == Side::F ? result.xi : result.eta;
    if (state.size() != modes.rows())
        throw InputError(kModule, "evaluate_mode", "state dimension does not match modes");
    const auto& mean = which == Side::F ? result.mean_x : result.mean_y;
    if (result.centered) return modes.col(index).dot(state - mean);
    return modes.col(index).dot(state);
}

void write_cmd_result(const CmdResult& result, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    io::write_vector_csv(dir / "rho.csv", result.rho, "rho");
    io::write_snapshot_binary(dir / "xi.cmdx", result.xi);
    io::write_snapshot_binary(dir / "eta.cmdx", result.eta);
    nlohmann::ordered_json meta;
    meta["epsilon"] = result.epsilon;
    meta["d"] = result.xi.rows();
    meta["n"] = result.v.rows();
    meta["k"] = result.k();
    meta["centered"] = result.centered;
    meta["absent_modes"] = result.absent;
    io::write_text(dir / "metadata.json", meta.dump(2) + "\n");
}

}  // namespace kcca
