#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string_view>

#include <Eigen/Dense>

#include "fundata/functional_data.hpp"
#include "fundata/kernel.hpp"

namespace fundata::smooth {

struct LocalPolyFit {
    /// X(t0), the first coefficient.
    double estimate = 0.0;
    /// Coefficients on U(u) = (1, u, ..., u^d / d!), u = (t - t0) / h.
    Eigen::VectorXd coefficients;
};

/// Kernel-weighted least-squares polynomial of degree `degree` around t0.
/// Throws RankDeficientError when the smallest eigenvalue of the normal
/// matrix is below 1e-10 * trace / (degree + 1).
LocalPolyFit local_poly_fit(std::span<const double> t, std::span<const double> y, double t0, int degree,
                            double bandwidth, Kernel kernel);

/// Same estimate without the coefficient vector. `skip` leaves one pair out.
double local_poly_estimate(std::span<const double> t, std::span<const double> y, double t0, int degree,
                           double bandwidth, Kernel kernel,
                           std::size_t skip = std::numeric_limits<std::size_t>::max());

enum class BandwidthMethod { fixed, knn, cv };

BandwidthMethod parse_bandwidth_method(std::string_view name);

struct BandwidthSpec {
    BandwidthMethod method = BandwidthMethod::knn;
    /// Used by `fixed`.
    double value = 0.0;
    /// Used by `knn`.
    std::size_t neighborhood = 2;
    /// knn anchor; NaN means the midpoint of the sampling range.
    double anchor = std::numeric_limits<double>::quiet_NaN();
};

/// knn: the larger of the distances from t0 to the `neighborhood`-th sampling
/// point on its left and on its right (only one side near a boundary); a point
/// located exactly at t0 is not counted.
/// cv: leave-one-out squared prediction error over 20 log-spaced bandwidths;
/// near-ties go to the larger bandwidth.
double estimate_bandwidth(std::span<const double> t, std::span<const double> y, double t0,
                          BandwidthMethod method, int degree = 1, Kernel kernel = Kernel::epanechnikov,
                          std::size_t neighborhood = 2);

/// Resolves `spec` for one curve sampled at sorted points `t`.
double resolve_bandwidth(const BandwidthSpec& spec, std::span<const double> t, std::span<const double> y,
                         int degree, Kernel kernel);

struct SmoothSpec {
    int degree = 1;
    Kernel kernel = Kernel::epanechnikov;
    BandwidthSpec bandwidth{};
};

/// Smooths every observation of a 1-D object onto `output` (default: the input
/// grid, or the union grid for irregular data). Missing cells are ignored.
DenseFD smooth_fd(const DenseFD& fd, const SmoothSpec& spec, const std::optional<Grid1D>& output = {});
DenseFD smooth_fd(const IrregularFD& fd, const SmoothSpec& spec, const std::optional<Grid1D>& output = {});
DenseFD smooth_fd(const UnivariateFD& fd, const SmoothSpec& spec, const std::optional<Grid1D>& output = {});

}  // namespace fundata::smooth
