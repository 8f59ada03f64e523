#pragma once

#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <variant>

namespace kcca {

/// Points are stored one per row: an n x d matrix holds n samples in R^d.
using PointSet = Eigen::MatrixXd;

struct GaussianKernel {
    double sigma = 1.0;
};

struct LinearKernel {};

struct PolynomialKernel {
    double offset = 1.0;
    int degree = 2;
};

/// Gaussian of the great-circle distance; points are (longitude, latitude)
/// in degrees, sigma and radius in kilometers.
struct HaversineGaussianKernel {
    double sigma = 30.0;
    double radius = 6371.0;
};

class Kernel {
public:
    using Variant =
        std::variant<GaussianKernel, LinearKernel, PolynomialKernel, HaversineGaussianKernel>;

    Kernel() : Kernel(GaussianKernel{}) {}
    Kernel(GaussianKernel k);
    Kernel(LinearKernel k);
    Kernel(PolynomialKernel k);
    Kernel(HaversineGaussianKernel k);

    /// Parses `gaussian:sigma=1.0`, `linear`, `poly:c=1,p=2`,
    /// `haversine:sigma=30,radius=6371`.
    static Kernel parse(std::string_view spec);

    /// Inverse of parse(); round-trips exactly.
    std::string to_string() const;

    const Variant& variant() const noexcept { return v_; }

    /// k(x, y). Throws InputError on dimension mismatch or non-finite input.
    double operator()(const Eigen::Ref<const Eigen::VectorXd>& x,
                      const Eigen::Ref<const Eigen::VectorXd>& y) const;

    /// Evaluation without argument validation, for inner loops over points
    /// already checked by the caller.
    double eval_unchecked(const double* x, const double* y, Eigen::Index dim) const;

private:
    Variant v_;
};

/// Great-circle distance between (lon, lat) pairs given in degrees.
double haversine_distance(double lon1, double lat1, double lon2, double lat2, double radius);

class GramMatrix {
public:
    GramMatrix() = default;
    GramMatrix(Eigen::MatrixXd entries, bool centered)
        : entries_(std::move(entries)), centered_(centered) {}

    const Eigen::MatrixXd& entries() const noexcept { return entries_; }
    bool centered() const noexcept { return centered_; }
    Eigen::Index n() const noexcept { return entries_.rows(); }

private:
    Eigen::MatrixXd entries_;
    bool centered_ = false;
};

/// entries(i, j) = k(a_i, b_j). Rows are assembled in parallel; every entry
/// is an independent evaluation, so results do not depend on thread count.
GramMatrix gram_matrix(const Kernel& k, const PointSet& a, const PointSet& b);

/// Rectangular kernel matrix [k(a_i, b_j)] for evaluation at new points.
Eigen::MatrixXd kernel_matrix(const Kernel& k, const PointSet& a, const PointSet& b);

/// N0 G N0 with N0 = I - (1/n) 1 1^T. Rejects already-centered input.
GramMatrix center_gram(const GramMatrix& g);

/// Functions of the form f(p) = sum_i c_i k~(a_i, p) over fixed anchor points,
/// where k~ is either the raw kernel or its empirically centered version
/// (feature map minus the anchor mean). Centering statistics of the raw anchor
/// Gram matrix are stored so off-sample evaluation matches N0 G N0 exactly on
/// the anchors.
class KernelBasis {
public:
    KernelBasis() = default;
    KernelBasis(Kernel kernel, PointSet anchors, bool centered);
    /// Reuses a precomputed raw Gram matrix of the anchors.
    KernelBasis(Kernel kernel, PointSet anchors, bool centered, const Eigen::MatrixXd& raw_gram);

    const Kernel& kernel() const noexcept { return kernel_; }
    const PointSet& anchors() const noexcept { return anchors_; }
    bool centered() const noexcept { return centered_; }
    Eigen::Index size() const noexcept { return anchors_.rows(); }

    /// m x n matrix of (centered) kernel values between points and anchors.
    Eigen::MatrixXd features(const PointSet& points) const;

    /// m x k matrix of function values for coefficient columns.
    Eigen::MatrixXd evaluate(const PointSet& points, const Eigen::MatrixXd& coeffs) const;

private:
    Kernel kernel_;
    PointSet anchors_;
    bool centered_ = false;
    Eigen::VectorXd row_means_;
    double total_mean_ = 0.0;
};

}  // namespace kcca
