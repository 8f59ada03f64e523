// Command-line front end: benchmark pipelines and generic ingestion.

#include "kcca/cca.hpp"
#include "kcca/clustering.hpp"
#include "kcca/cmd.hpp"
#include "kcca/dynamics.hpp"
#include "kcca/error.hpp"
#include "kcca/io.hpp"
#include "kcca/operators.hpp"
#include "kcca/parallel.hpp"
#include "kcca/pipelines.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <type_traits>

#ifndef KCCA_VERSION
#define KCCA_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct Common {
    std::string out;
    std::uint64_t seed = 0;
};

struct BickleyArgs {
    Common c;
    Eigen::Index n = 10000;
    bool desk = false;
    double tau = 40.0;
    std::string kernel = "gaussian:sigma=1";
    double epsilon = 1e-7;
    Eigen::Index k = 10;
    int clusters = 9;
    Eigen::Index embed = 8;
    bool centered = true;
    int grid_nx = 200;
    int grid_ny = 60;
    bool write_pairs = false;
};

struct WellsArgs {
    Common c;
    Eigen::Index n = 1000;
    double beta = 3.0;
    std::string kernel = "gaussian:sigma=1";
    double epsilon = 1e-6;
    Eigen::Index k = 10;
    int clusters = 5;
    Eigen::Index embed = 4;
    bool centered = true;
    bool write_pairs = false;
};

struct CcaCsvArgs {
    Common c;
    std::string input;
    std::string preset;
    std::string kernel = "gaussian:sigma=1";
    std::string kernel_y;
    double epsilon = 1e-6;
    Eigen::Index k = 10;
    bool centered = true;
    std::string formulation = "variant-ii";
    std::string g_recovery = "ii";
    int clusters = 0;
    Eigen::Index embed = 0;
};

struct CmdFileArgs {
    Common c;
    std::string input;
    std::string input_y;
    double epsilon = 0.1;
    Eigen::Index k = 10;
    Eigen::Index skip = 0;
    bool centered = false;
};

struct KpcaArgs {
    Common c;
    std::string input;
    std::string kernel = "gaussian:sigma=1";
    Eigen::Index k = 10;
};

struct GramArgs {
    std::string input;
    std::string kernel = "gaussian:sigma=1";
    bool centered = false;
    std::string out;
};

double gaussian_sigma(const kcca::Kernel& k, const char* command) {
    const auto* g = std::get_if<kcca::GaussianKernel>(&k.variant());
    if (!g)
        throw kcca::UsageError("cli", command, "this pipeline requires a gaussian kernel");
    return g->sigma;
}

json cca_summary(const kcca::CcaResult& r) {
    json j;
    j["formulation"] = kcca::to_string(r.formulation);
    j["epsilon"] = r.epsilon;
    j["centered"] = r.centered;
    j["n"] = r.n;
    j["k"] = r.k();
    j["warnings"] = r.warnings;
    return j;
}

void write_metadata(const fs::path& dir, const std::string& command, json params,
                    json extra = json::object()) {
    json meta;
    meta["command"] = command;
    meta["version"] = KCCA_VERSION;
    meta["parameters"] = std::move(params);
    for (auto& [key, value] : extra.items()) meta[key] = value;
    kcca::io::write_text(dir / "metadata.json", meta.dump(2) + "\n");
}

void write_partition(const fs::path& dir, const kcca::Partition& p) {
    kcca::io::write_labels_csv(dir / "labels.csv", p.labels);
    std::vector<std::string> header;
    for (Eigen::Index j = 0; j < p.centers.cols(); ++j) header.push_back("f" + std::to_string(j + 1));
    kcca::io::write_matrix_csv(dir / "centers.csv", p.centers, header);
}

void write_labeled_points(const fs::path& path, const kcca::PointSet& pts,
                          const std::vector<int>& labels) {
    Eigen::MatrixXd m(pts.rows(), pts.cols() + 1);
    m.leftCols(pts.cols()) = pts;
    for (Eigen::Index i = 0; i < pts.rows(); ++i)
        m(i, pts.cols()) = labels[static_cast<std::size_t>(i)];
    std::vector<std::string> header;
    for (Eigen::Index j = 0; j < pts.cols(); ++j) header.push_back("x" + std::to_string(j + 1));
    header.push_back("label");
    kcca::io::write_matrix_csv(path, m, header);
}

void write_grid(const fs::path& path, const kcca::CcaResult& r, kcca::Side side,
                const kcca::Domain& domain, int nx, int ny) {
    const kcca::PointSet grid = kcca::regular_grid(domain, nx, ny);
    const Eigen::MatrixXd vals = kcca::evaluate_eigenfunctions(r, side, grid);
    Eigen::MatrixXd m(grid.rows(), 2 + vals.cols());
    m << grid, vals;
    std::vector<std::string> header{"x1", "x2"};
    const std::string prefix = side == kcca::Side::F ? "f" : "g";
    for (Eigen::Index j = 0; j < vals.cols(); ++j) header.push_back(prefix + std::to_string(j + 1));
    kcca::io::write_matrix_csv(path, m, header);
}

void write_spectrum(const fs::path& dir, const kcca::CcaResult& r) {
    kcca::io::write_vector_csv(dir / "rho_squared.csv", r.rho_squared, "rho_squared");
}

void run_bickley(const BickleyArgs& a) {
    kcca::BickleyPipeline cfg;
    cfg.n = a.desk ? 2000 : a.n;
    cfg.seed = a.c.seed;
    cfg.flow.tau = a.tau;
    const kcca::Kernel kernel = kcca::Kernel::parse(a.kernel);
    cfg.sigma = gaussian_sigma(kernel, "bickley");
    cfg.epsilon = a.epsilon;
    cfg.k = a.k;
    cfg.centered = a.centered;
    cfg.clusters = a.clusters;
    cfg.embed_dims = a.embed;
    const auto run = kcca::run_bickley(cfg);

    const fs::path dir(a.c.out);
    kcca::write_cca_result(run.cca, dir, kernel.to_string());
    write_spectrum(dir, run.cca);
    write_partition(dir, run.partition);
    write_grid(dir / "eigenfunctions_grid.csv", run.cca, kcca::Side::F, cfg.flow.domain(),
               a.grid_nx, a.grid_ny);
    if (a.write_pairs) kcca::io::write_pairs_csv(dir / "pairs.csv", run.pairs);

    json params;
    params["n"] = cfg.n;
    params["seed"] = cfg.seed;
    params["tau"] = cfg.flow.tau;
    params["kernel"] = kernel.to_string();
    params["epsilon"] = cfg.epsilon;
    params["k"] = cfg.k;
    params["centered"] = cfg.centered;
    params["clusters"] = cfg.clusters;
    params["embed_dims"] = cfg.embed_dims;
    params["grid"] = {a.grid_nx, a.grid_ny};
    json flow;
    flow["u0"] = cfg.flow.u0;
    flow["length"] = cfg.flow.length;
    flow["radius"] = cfg.flow.radius;
    flow["amplitudes"] = cfg.flow.amplitudes;
    flow["speed_factors"] = cfg.flow.speed_factors;
    flow["step"] = cfg.flow.step;
    flow["period"] = cfg.flow.period;
    params["flow"] = flow;
    json extra;
    extra["cca"] = cca_summary(run.cca);
    extra["inertia"] = run.partition.inertia;
    extra["coherence_score"] =
        kcca::coherence_score(run.pairs, run.partition.labels, 0.1, cfg.flow.period);
    write_metadata(dir, "bickley", params, extra);
    std::cout << "rho:";
    for (Eigen::Index j = 0; j < run.cca.k(); ++j) std::cout << ' ' << run.cca.rho(j);
    std::cout << '\n';
}

void run_wells(const WellsArgs& a) {
    kcca::WellsPipeline cfg;
    cfg.n = a.n;
    cfg.seed = a.c.seed;
    cfg.sde.beta = a.beta;
    const kcca::Kernel kernel = kcca::Kernel::parse(a.kernel);
    cfg.sigma = gaussian_sigma(kernel, "wells");
    cfg.epsilon = a.epsilon;
    cfg.k = a.k;
    cfg.centered = a.centered;
    cfg.clusters = a.clusters;
    cfg.embed_dims = a.embed;
    const auto run = kcca::run_wells(cfg);

    const fs::path dir(a.c.out);
    kcca::write_cca_result(run.cca, dir, kernel.to_string());
    write_spectrum(dir, run.cca);
    write_partition(dir, run.partition);
    write_labeled_points(dir / "labels_t0.csv", run.pairs.x, run.partition.labels);
    write_labeled_points(dir / "labels_t10.csv", run.pairs.y, run.partition.labels);
    if (a.write_pairs) kcca::io::write_pairs_csv(dir / "pairs.csv", run.pairs);

    json params;
    params["n"] = cfg.n;
    params["seed"] = cfg.seed;
    params["beta"] = cfg.sde.beta;
    params["wells"] = cfg.sde.wells;
    params["step"] = cfg.sde.step;
    params["t_span"] = {cfg.sde.t0, cfg.sde.t1};
    params["kernel"] = kernel.to_string();
    params["epsilon"] = cfg.epsilon;
    params["k"] = cfg.k;
    params["centered"] = cfg.centered;
    params["clusters"] = cfg.clusters;
    params["embed_dims"] = cfg.embed_dims;
    json extra;
    extra["cca"] = cca_summary(run.cca);
    extra["inertia"] = run.partition.inertia;
    write_metadata(dir, "wells", params, extra);
    std::cout << "eigenvalues:";
    for (Eigen::Index j = 0; j < run.cca.k(); ++j) std::cout << ' ' << run.cca.rho_squared(j);
    std::cout << '\n';
}

void run_cca_csv(CcaCsvArgs a) {
    if (a.preset == "ocean") {
        a.kernel = "haversine:sigma=30";
        a.epsilon = 1e-4;
        if (a.clusters == 0) a.clusters = 6;
        if (a.embed == 0) a.embed = 6;
    } else if (!a.preset.empty()) {
        throw kcca::UsageError("cli", "cca-csv", "unknown preset '" + a.preset + "'");
    }
    const kcca::TrajectoryPairs pairs = kcca::io::read_pairs_csv(a.input);
    const kcca::Kernel kx = kcca::Kernel::parse(a.kernel);
    const kcca::Kernel ky = a.kernel_y.empty() ? kx : kcca::Kernel::parse(a.kernel_y);
    kcca::CcaOptions opts;
    opts.k = a.k;
    opts.centered = a.centered;
    opts.g_recovery = a.g_recovery == "i" ? kcca::GRecovery::I : kcca::GRecovery::II;
    if (a.g_recovery != "i" && a.g_recovery != "ii")
        throw kcca::UsageError("cli", "cca-csv", "--g-recovery must be i or ii");
    kcca::CcaResult r;
    const kcca::linalg::RegParam reg{a.epsilon};
    if (a.formulation == "variant-ii") {
        r = kcca::kernel_cca(pairs, kx, ky, reg, opts);
    } else if (a.formulation == "variant-i") {
        opts.variant = kcca::CcaFormulation::GramVariantI;
        r = kcca::kernel_cca(pairs, kx, ky, reg, opts);
    } else if (a.formulation == "generalized") {
        r = kcca::kernel_cca_generalized(pairs, kx, ky, reg, opts);
    } else {
        throw kcca::UsageError("cli", "cca-csv",
                               "--formulation must be variant-i, variant-ii or generalized");
    }
    const fs::path dir(a.c.out);
    kcca::write_cca_result(r, dir, kx.to_string());
    write_spectrum(dir, r);
    json params;
    params["input"] = a.input;
    params["preset"] = a.preset;
    params["kernel_x"] = kx.to_string();
    params["kernel_y"] = ky.to_string();
    params["epsilon"] = a.epsilon;
    params["k"] = a.k;
    params["centered"] = a.centered;
    params["formulation"] = a.formulation;
    params["g_recovery"] = a.g_recovery;
    params["seed"] = a.c.seed;
    json extra;
    extra["cca"] = cca_summary(r);
    if (a.clusters > 0) {
        const Eigen::Index dims = a.embed > 0 ? a.embed : std::min<Eigen::Index>(r.k(), a.clusters);
        const auto emb = kcca::cca_embedding(r, dims);
        const auto part = kcca::kmeans(emb, a.clusters, a.c.seed);
        write_partition(dir, part);
        params["clusters"] = a.clusters;
        params["embed_dims"] = emb.points.cols();
        extra["inertia"] = part.inertia;
    }
    write_metadata(dir, "cca-csv", params, extra);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
}

void run_cmd_file(const CmdFileArgs& a) {
    kcca::SnapshotMatrices snap;
    const Eigen::MatrixXd z = kcca::io::read_snapshot_file(a.input);
    if (a.input_y.empty()) {
        snap = kcca::SnapshotMatrices::sequential(z, a.skip);
    } else {
        const Eigen::MatrixXd zy = kcca::io::read_snapshot_file(a.input_y);
        if (zy.rows() != z.rows() || zy.cols() != z.cols())
            throw kcca::InputError("cli", "cmd-file", "X and Y snapshot files differ in d or n");
        if (a.skip >= z.cols() - 1)
            throw kcca::InputError("cli", "cmd-file", "skip count leaves fewer than 2 pairs");
        snap.x = z.rightCols(z.cols() - a.skip);
        snap.y = zy.rightCols(zy.cols() - a.skip);
    }
    kcca::CmdOptions opts;
    opts.k = a.k;
    opts.centered = a.centered;
    const auto r = kcca::cmd(snap, kcca::linalg::RegParam{a.epsilon}, opts);
    const fs::path dir(a.c.out);
    kcca::write_cmd_result(r, dir);
    json params;
    params["input"] = a.input;
    params["input_y"] = a.input_y;
    params["epsilon"] = a.epsilon;
    params["k"] = a.k;
    params["skip_transient"] = a.skip;
    params["centered"] = a.centered;
    json extra;
    extra["d"] = snap.d();
    extra["n"] = snap.n();
    extra["absent_modes"] = r.absent;
    write_metadata(dir, "cmd-file", params, extra);
    std::cout << "rho:";
    for (Eigen::Index j = 0; j < r.k(); ++j) std::cout << ' ' << r.rho(j);
    std::cout << '\n';
}

void run_kpca(const KpcaArgs& a) {
    const Eigen::MatrixXd pts = kcca::io::read_matrix_csv(a.input);
    const kcca::Kernel kernel = kcca::Kernel::parse(a.kernel);
    const auto r = kcca::kernel_pca(pts, kernel, std::min<Eigen::Index>(a.k, pts.rows()));
    const fs::path dir(a.c.out);
    fs::create_directories(dir);
    kcca::io::write_vector_csv(dir / "eigenvalues.csv", r.eigenvalues, "eigenvalue");
    kcca::io::write_matrix_csv(dir / "projections.csv", r.projections);
    std::ofstream os(dir / "eigenfunctions.csv");
    kcca::write_eigenfunctions_csv(os, r.functions);
    json params;
    params["input"] = a.input;
    params["kernel"] = kernel.to_string();
    params["k"] = a.k;
    write_metadata(dir, "kpca-csv", params);
}

void run_gram(const GramArgs& a) {
    const Eigen::MatrixXd pts = kcca::io::read_matrix_csv(a.input);
    const kcca::Kernel kernel = kcca::Kernel::parse(a.kernel);
    kcca::GramMatrix g = kcca::gram_matrix(kernel, pts, pts);
    if (a.centered) g = kcca::center_gram(g);
    if (a.out.empty()) {
        for (Eigen::Index i = 0; i < g.n(); ++i) {
            for (Eigen::Index j = 0; j < g.n(); ++j)
                std::cout << (j ? "," : "") << kcca::io::format_double(g.entries()(i, j));
            std::cout << '\n';
        }
    } else {
        kcca::io::write_matrix_csv(a.out, g.entries());
    }
}

void add_out(CLI::App* sub, Common& c) {
    sub->add_option("--out", c.out, "Artifact directory")->required();
    sub->add_option("--seed", c.seed, "Master random seed");
}

/// Resolved parameters of one subcommand, readable back through --config.
class RunToml {
public:
    explicit RunToml(const std::string& command) { text_ = "[" + command + "]\n"; }
    RunToml& add(const std::string& key, const std::string& v) {
        text_ += key + "=" + json(v).dump() + "\n";
        return *this;
    }
    RunToml& add(const std::string& key, const char* v) { return add(key, std::string(v)); }
    RunToml& add(const std::string& key, bool v) {
        text_ += key + (v ? "=true\n" : "=false\n");
        return *this;
    }
    RunToml& add(const std::string& key, double v) {
        text_ += key + "=" + kcca::io::format_double(v) + "\n";
        return *this;
    }
    template <class I>
        requires std::is_integral_v<I>
    RunToml& add(const std::string& key, I v) {
        text_ += key + "=" + std::to_string(v) + "\n";
        return *this;
    }
    void save(const std::string& dir) const {
        kcca::io::write_text(fs::path(dir) / "run.toml", text_);
    }

private:
    std::string text_;
};

void save_config(const BickleyArgs& a) {
    RunToml("bickley")
        .add("out", a.c.out).add("seed", a.c.seed).add("n", a.n).add("desk", a.desk)
        .add("tau", a.tau).add("kernel", a.kernel).add("epsilon", a.epsilon).add("k", a.k)
        .add("clusters", a.clusters).add("embed", a.embed).add("centered", a.centered)
        .add("grid-nx", a.grid_nx).add("grid-ny", a.grid_ny).add("write-pairs", a.write_pairs)
        .save(a.c.out);
}

void save_config(const WellsArgs& a) {
    RunToml("wells")
        .add("out", a.c.out).add("seed", a.c.seed).add("n", a.n).add("beta", a.beta)
        .add("kernel", a.kernel).add("epsilon", a.epsilon).add("k", a.k)
        .add("clusters", a.clusters).add("embed", a.embed).add("centered", a.centered)
        .add("write-pairs", a.write_pairs)
        .save(a.c.out);
}

void save_config(const CcaCsvArgs& a) {
    RunToml t("cca-csv");
    t.add("out", a.c.out).add("seed", a.c.seed).add("input", a.input);
    if (!a.preset.empty()) t.add("preset", a.preset);
    t.add("kernel", a.kernel);
    if (!a.kernel_y.empty()) t.add("kernel-y", a.kernel_y);
    t.add("epsilon", a.epsilon).add("k", a.k).add("centered", a.centered)
        .add("formulation", a.formulation).add("g-recovery", a.g_recovery)
        .add("clusters", a.clusters).add("embed", a.embed)
        .save(a.c.out);
}

void save_config(const CmdFileArgs& a) {
    RunToml t("cmd-file");
    t.add("out", a.c.out).add("seed", a.c.seed).add("input", a.input);
    if (!a.input_y.empty()) t.add("input-y", a.input_y);
    t.add("epsilon", a.epsilon).add("k", a.k).add("skip-transient", a.skip)
        .add("centered", a.centered)
        .save(a.c.out);
}

void save_config(const KpcaArgs& a) {
    RunToml("kpca-csv")
        .add("out", a.c.out).add("seed", a.c.seed).add("input", a.input)
        .add("kernel", a.kernel).add("k", a.k)
        .save(a.c.out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kernel CCA, coherent sets and coherent mode decomposition"};
    app.set_config("--config", "", "Read parameters from a TOML file written as run.toml");
    app.set_version_flag("--version", KCCA_VERSION);
    int threads = 0;
    app.add_option("--threads", threads, "Worker threads (0 = hardware concurrency)")
        ->check(CLI::NonNegativeNumber);
    app.require_subcommand(1);

    BickleyArgs ba;
    auto* bickley = app.add_subcommand("bickley", "Bickley jet coherent sets");
    add_out(bickley, ba.c);
    bickley->add_option("--n", ba.n, "Number of samples")->capture_default_str();
    bickley->add_flag("--desk", ba.desk, "Desk-scale run with n = 2000");
    bickley->add_option("--tau", ba.tau, "Lag time")->capture_default_str();
    bickley->add_option("--kernel", ba.kernel, "Kernel spec")->capture_default_str();
    bickley->add_option("--epsilon", ba.epsilon, "Regularization")->capture_default_str();
    bickley->add_option("--k", ba.k, "Number of eigenpairs")->capture_default_str();
    bickley->add_option("--clusters", ba.clusters, "k-means cluster count")->capture_default_str();
    bickley->add_option("--embed", ba.embed, "Eigenfunctions in the embedding")->capture_default_str();
    bickley->add_flag("--centered,!--no-centered", ba.centered, "Center Gram matrices");
    bickley->add_option("--grid-nx", ba.grid_nx, "Evaluation grid columns")->capture_default_str();
    bickley->add_option("--grid-ny", ba.grid_ny, "Evaluation grid rows")->capture_default_str();
    bickley->add_flag("--write-pairs", ba.write_pairs, "Also write pairs.csv");

    WellsArgs wa;
    auto* wells = app.add_subcommand("wells", "Rotating five-well potential coherent sets");
    add_out(wells, wa.c);
    wells->add_option("--n", wa.n, "Number of samples")->capture_default_str();
    wells->add_option("--beta", wa.beta, "Inverse temperature")->capture_default_str();
    wells->add_option("--kernel", wa.kernel, "Kernel spec")->capture_default_str();
    wells->add_option("--epsilon", wa.epsilon, "Regularization")->capture_default_str();
    wells->add_option("--k", wa.k, "Number of eigenpairs")->capture_default_str();
    wells->add_option("--clusters", wa.clusters, "k-means cluster count")->capture_default_str();
    wells->add_option("--embed", wa.embed, "Eigenfunctions in the embedding")->capture_default_str();
    wells->add_flag("--centered,!--no-centered", wa.centered, "Center Gram matrices");
    wells->add_flag("--write-pairs", wa.write_pairs, "Also write pairs.csv");

    CcaCsvArgs ca;
    auto* cca = app.add_subcommand("cca-csv", "Kernel CCA on a paired-trajectory CSV");
    add_out(cca, ca.c);
    cca->add_option("--input", ca.input, "CSV with header x1..,y1..")->required();
    cca->add_option("--preset", ca.preset, "Parameter preset (ocean)");
    cca->add_option("--kernel", ca.kernel, "Kernel spec for X (and Y)")->capture_default_str();
    cca->add_option("--kernel-y", ca.kernel_y, "Kernel spec for Y");
    cca->add_option("--epsilon", ca.epsilon, "Regularization")->capture_default_str();
    cca->add_option("--k", ca.k, "Number of eigenpairs")->capture_default_str();
    cca->add_flag("--centered,!--no-centered", ca.centered, "Center Gram matrices");
    cca->add_option("--formulation", ca.formulation, "variant-ii, variant-i or generalized")
        ->capture_default_str();
    cca->add_option("--g-recovery", ca.g_recovery, "g-hat recovery formula (i or ii)")
        ->capture_default_str();
    cca->add_option("--clusters", ca.clusters, "k-means cluster count (0 = none)");
    cca->add_option("--embed", ca.embed, "Eigenfunctions in the embedding");

    CmdFileArgs ma;
    auto* cmdf = app.add_subcommand("cmd-file", "Coherent mode decomposition of snapshots");
    add_out(cmdf, ma.c);
    cmdf->add_option("--input", ma.input, "Snapshot file (CMDX binary or CSV), d x m")->required();
    cmdf->add_option("--input-y", ma.input_y, "Paired Y snapshots; default: sequential pairs");
    cmdf->add_option("--epsilon", ma.epsilon, "Regularization")->capture_default_str();
    cmdf->add_option("--k", ma.k, "Number of modes")->capture_default_str();
    cmdf->add_option("--skip-transient", ma.skip, "Leading snapshots to drop")->capture_default_str();
    cmdf->add_flag("--centered,!--no-centered", ma.centered, "Center the snapshots");

    KpcaArgs ka;
    auto* kpca = app.add_subcommand("kpca-csv", "Kernel PCA of a point CSV");
    add_out(kpca, ka.c);
    kpca->add_option("--input", ka.input, "CSV, one point per row")->required();
    kpca->add_option("--kernel", ka.kernel, "Kernel spec")->capture_default_str();
    kpca->add_option("--k", ka.k, "Number of components")->capture_default_str();

    GramArgs ga;
    auto* gram = app.add_subcommand("gram", "Print a Gram matrix (debugging)");
    gram->add_option("--input", ga.input, "CSV, one point per row")->required();
    gram->add_option("--kernel", ga.kernel, "Kernel spec")->capture_default_str();
    gram->add_flag("--centered,!--no-centered", ga.centered, "Center the Gram matrix");
    gram->add_option("--out", ga.out, "Output CSV (default: stdout)");

    // Subcommands read their section of --config and pass --threads up to the app.
    for (auto* sub : {bickley, wells, cca, cmdf, kpca, gram}) {
        sub->configurable();
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        kcca::set_num_threads(threads);
        if (*bickley) {
            run_bickley(ba);
            save_config(ba);
        } else if (*wells) {
            run_wells(wa);
            save_config(wa);
        } else if (*cca) {
            run_cca_csv(ca);
            save_config(ca);
        } else if (*cmdf) {
            run_cmd_file(ma);
            save_config(ma);
        } else if (*kpca) {
            run_kpca(ka);
            save_config(ka);
        } else if (*gram) {
            run_gram(ga);
        }
    } catch (const kcca::NumericalError& e) {
        std::cerr << "numerical error [" << e.module() << "/" << e.operation() << "]: " << e.cause()
                  << '\n';
        return 3;
    } catch (const kcca::Error& e) {
        std::cerr << "input error [" << e.module() << "/" << e.operation() << "]: " << e.cause()
                  << '\n';
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "input error [cli/io]: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
