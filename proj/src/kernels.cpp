#include "kcca/kernels.hpp"

#include "kcca/error.hpp"
#include "kcca/parallel.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>

namespace kcca {

namespace {

constexpr const char* kModule = "kernels";

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void validate(const GaussianKernel& k) {
    if (!(k.sigma > 0.0) || !std::isfinite(k.sigma))
        throw InputError(kModule, "Kernel", "gaussian bandwidth must be positive");
}
void validate(const PolynomialKernel& k) {
    if (!(k.offset >= 0.0) || !std::isfinite(k.offset))
        throw InputError(kModule, "Kernel", "polynomial offset must be >= 0");
    if (k.degree < 1) throw InputError(kModule, "Kernel", "polynomial degree must be >= 1");
}
void validate(const HaversineGaussianKernel& k) {
    if (!(k.sigma > 0.0) || !std::isfinite(k.sigma))
        throw InputError(kModule, "Kernel", "haversine bandwidth must be positive");
    if (!(k.radius > 0.0) || !std::isfinite(k.radius))
        throw InputError(kModule, "Kernel", "sphere radius must be positive");
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::map<std::string, double, std::less<>> parse_params(std::string_view body,
                                                        std::string_view spec) {
    std::map<std::string, double, std::less<>> out;
    while (!body.empty()) {
        const auto comma = body.find(',');
        const auto item = trim(body.substr(0, comma));
        body = comma == std::string_view::npos ? std::string_view{} : body.substr(comma + 1);
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string_view::npos)
            throw InputError(kModule, "parse", "expected key=value in '" + std::string(spec) + "'");
        const auto key = trim(item.substr(0, eq));
        const auto val = trim(item.substr(eq + 1));
        double x = 0.0;
        auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), x);
        if (ec != std::errc{} || ptr != val.data() + val.size())
            throw InputError(kModule, "parse",
                             "bad number '" + std::string(val) + "' in '" + std::string(spec) + "'");
        out.emplace(std::string(key), x);
    }
    return out;
}

double take(std::map<std::string, double, std::less<>>& params, std::string_view key,
            double fallback) {
    auto it = params.find(key);
    if (it == params.end()) return fallback;
    double v = it->second;
    params.erase(it);
    return v;
}

constexpr double kDegToRad = std::numbers::pi / 180.0;

}  // namespace

Kernel::Kernel(GaussianKernel k) : v_(k) { validate(k); }
Kernel::Kernel(LinearKernel k) : v_(k) {}
Kernel::Kernel(PolynomialKernel k) : v_(k) { validate(k); }
Kernel::Kernel(HaversineGaussianKernel k) : v_(k) { validate(k); }

Kernel Kernel::parse(std::string_view spec) {
    spec = trim(spec);
    const auto colon = spec.find(':');
    const auto name = trim(spec.substr(0, colon));
    auto params = parse_params(
        colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1), spec);

    Kernel k;
    if (name == "gaussian" || name == "rbf") {
        k = Kernel(GaussianKernel{take(params, "sigma", 1.0)});
    } else if (name == "linear") {
        k = Kernel(LinearKernel{});
    } else if (name == "poly" || name == "polynomial") {
        const double p = take(params, "p", 2.0);
        if (p != std::floor(p))
            throw InputError(kModule, "parse", "polynomial degree must be an integer");
        k = Kernel(PolynomialKernel{take(params, "c", 1.0), static_cast<int>(p)});
    } else if (name == "haversine") {
        const double sigma = take(params, "sigma", 30.0);
        k = Kernel(HaversineGaussianKernel{sigma, take(params, "radius", 6371.0)});
    } else {
        throw InputError(kModule, "parse", "unknown kernel '" + std::string(name) + "'");
    }
    if (!params.empty())
        throw InputError(kModule, "parse",
                         "unknown parameter '" + params.begin()->first + "' for kernel '" +
                             std::string(name) + "'");
    return k;
}

std::string Kernel::to_string() const {
    struct Visitor {
        std::string operator()(const GaussianKernel& k) const {
            return "gaussian:sigma=" + format_double(k.sigma);
        }
        std::string operator()(const LinearKernel&) const { return "linear"; }
        std::string operator()(const PolynomialKernel& k) const {
            return "poly:c=" + format_double(k.offset) + ",p=" + std::to_string(k.degree);
        }
        std::string operator()(const HaversineGaussianKernel& k) const {
            return "haversine:sigma=" + format_double(k.sigma) +
                   ",radius=" + format_double(k.radius);
        }
    };
    return std::visit(Visitor{}, v_);
}

double haversine_distance(double lon1, double lat1, double lon2, double lat2, double radius) {
    const double phi1 = lat1 * kDegToRad;
    const double phi2 = lat2 * kDegToRad;
    const double dphi = (lat2 - lat1) * kDegToRad;
    const double dlambda = (lon2 - lon1) * kDegToRad;
    const double s1 = std::sin(0.5 * dphi);
    const double s2 = std::sin(0.5 * dlambda);
    double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
    h = std::clamp(h, 0.0, 1.0);
    return 2.0 * radius * std::asin(std::sqrt(h));
}

double Kernel::eval_unchecked(const double* x, const double* y, Eigen::Index dim) const {
    struct Visitor {
        const double* x;
        const double* y;
        Eigen::Index dim;

        double dot() const {
            double s = 0.0;
            for (Eigen::Index i = 0; i < dim; ++i) s += x[i] * y[i];
            return s;
        }
        double operator()(const GaussianKernel& k) const {
            double s = 0.0;
            for (Eigen::Index i = 0; i < dim; ++i) {
                const double d = x[i] - y[i];
                s += d * d;
            }
            return std::exp(-s / (2.0 * k.sigma * k.sigma));
        }
        double operator()(const LinearKernel&) const { return dot(); }
        double operator()(const PolynomialKernel& k) const {
            const double base = k.offset + dot();
            double r = 1.0;
            for (int i = 0; i < k.degree; ++i) r *= base;
            return r;
        }
        double operator()(const HaversineGaussianKernel& k) const {
            const double d = haversine_distance(x[0], x[1], y[0], y[1], k.radius);
            return std::exp(-d * d / (2.0 * k.sigma * k.sigma));
        }
    };
    return std::visit(Visitor{x, y, dim}, v_);
}

namespace {

void check_points(const Kernel& k, const double* p, Eigen::Index dim, const char* op) {
    for (Eigen::Index i = 0; i < dim; ++i)
        if (!std::isfinite(p[i])) throw InputError(kModule, op, "non-finite coordinate");
    if (std::holds_alternative<HaversineGaussianKernel>(k.variant())) {
        if (dim != 2)
            throw InputError(kModule, op, "haversine kernel needs (longitude, latitude) points");
        if (p[0] < -180.0 || p[0] > 180.0 || p[1] < -90.0 || p[1] > 90.0)
            throw InputError(kModule, op, "longitude/latitude out of range");
    }
}

void check_set(const Kernel& k, const PointSet& pts, const char* op) {
    Eigen::VectorXd row(pts.cols());
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
        row = pts.row(i).transpose();
        check_points(k, row.data(), row.size(), op);
    }
}

}  // namespace

double Kernel::operator()(const Eigen::Ref<const Eigen::VectorXd>& x,
                          const Eigen::Ref<const Eigen::VectorXd>& y) const {
    if (x.size() != y.size())
        throw InputError(kModule, "eval_kernel", "dimension mismatch");
    const Eigen::VectorXd xc = x;
    const Eigen::VectorXd yc = y;
    check_points(*this, xc.data(), xc.size(), "eval_kernel");
    check_points(*this, yc.data(), yc.size(), "eval_kernel");
    return eval_unchecked(xc.data(), yc.data(), xc.size());
}

Eigen::MatrixXd kernel_matrix(const Kernel& k, const PointSet& a, const PointSet& b) {
    if (a.rows() == 0 || b.rows() == 0)
        throw InputError(kModule, "gram_matrix", "empty point set");
    if (a.cols() != b.cols())
        throw InputError(kModule, "gram_matrix", "point sets differ in dimension");
    check_set(k, a, "gram_matrix");
    check_set(k, b, "gram_matrix");

    // Row-major copies so each point is contiguous.
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const RowMajor ar = a;
    const RowMajor br = b;
    const Eigen::Index dim = a.cols();
    Eigen::MatrixXd out(a.rows(), b.rows());
    parallel_for(a.rows(), [&](std::ptrdiff_t begin, std::ptrdiff_t end) {
        for (std::ptrdiff_t i = begin; i < end; ++i)
            for (Eigen::Index j = 0; j < br.rows(); ++j)
                out(i, j) = k.eval_unchecked(ar.row(i).data(), br.row(j).data(), dim);
    });
    return out;
}

GramMatrix gram_matrix(const Kernel& k, const PointSet& a, const PointSet& b) {
    if (a.rows() != b.rows())
        throw InputError(kModule, "gram_matrix", "point lists differ in length");
    return GramMatrix(kernel_matrix(k, a, b), false);
}

GramMatrix center_gram(const GramMatrix& g) {
    if (g.centered())
        throw UsageError(kModule, "center_gram", "Gram matrix is already centered");
    const auto& e = g.entries();
    if (e.rows() != e.cols()) throw InputError(kModule, "center_gram", "Gram matrix not square");
    const Eigen::VectorXd row_means = e.rowwise().mean();
    const Eigen::RowVectorXd col_means = e.colwise().mean();
    const double total = e.mean();
    Eigen::MatrixXd c = e;
    c.colwise() -= row_means;
    c.rowwise() -= col_means;
    c.array() += total;
    return GramMatrix(std::move(c), true);
}

KernelBasis::KernelBasis(Kernel kernel, PointSet anchors, bool centered)
    : kernel_(std::move(kernel)), anchors_(std::move(anchors)), centered_(centered) {
    if (centered_) {
        const Eigen::MatrixXd g = kernel_matrix(kernel_, anchors_, anchors_);
        row_means_ = g.rowwise().mean();
        total_mean_ = g.mean();
    }
}

KernelBasis::KernelBasis(Kernel kernel, PointSet anchors, bool centered,
                         const Eigen::MatrixXd& raw_gram)
    : kernel_(std::move(kernel)), anchors_(std::move(anchors)), centered_(centered) {
    if (raw_gram.rows() != anchors_.rows() || raw_gram.cols() != anchors_.rows())
        throw InputError(kModule, "KernelBasis", "Gram matrix does not match anchors");
    if (centered_) {
        row_means_ = raw_gram.rowwise().mean();
        total_mean_ = raw_gram.mean();
    }
}

Eigen::MatrixXd KernelBasis::features(const PointSet& points) const {
    if (points.cols() != anchors_.cols())
        throw InputError(kModule, "evaluate", "point dimension does not match anchors");
    Eigen::MatrixXd k = kernel_matrix(kernel_, points, anchors_);
    if (centered_) {
        const Eigen::VectorXd point_means = k.rowwise().mean();
        k.colwise() -= point_means;
        k.rowwise() -= row_means_.transpose();
        k.array() += total_mean_;
    }
    return k;
}

Eigen::MatrixXd KernelBasis::evaluate(const PointSet& points, const Eigen::MatrixXd& coeffs) const {
    if (coeffs.rows() != anchors_.rows())
        throw InputError(kModule, "evaluate", "coefficient length does not match anchors");
    // Blocks bound the m x n temporary for large evaluation grids.
    constexpr Eigen::Index kBlock = 1024;
    Eigen::MatrixXd out(points.rows(), coeffs.cols());
    for (Eigen::Index start = 0; start < points.rows(); start += kBlock) {
        const Eigen::Index len = std::min(kBlock, points.rows() - start);
        out.middleRows(start, len) = features(points.middleRows(start, len)) * coeffs;
    }
    return out;
}

}  // namespace kcca
