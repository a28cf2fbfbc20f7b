#pragma once

#include <cstddef>
#include <optional>

#include <Eigen/Dense>

#include "fundata/functional_data.hpp"
#include "fundata/local_poly.hpp"

namespace fundata::moments {

/// Values of the mean function on a 1-D grid, plus per-point contributor counts.
struct MeanOptions {
    /// Smooth each observation (within its own sampling range) before averaging.
    std::optional<smooth::SmoothSpec> presmooth;
};

/// Pointwise average over observed cells; the result has one observation.
/// Irregular data are averaged on the union grid.
DenseFD estimate_mean(const DenseFD& fd, const MeanOptions& options = {});
DenseFD estimate_mean(const IrregularFD& fd, const MeanOptions& options = {});
DenseFD estimate_mean(const UnivariateFD& fd, const MeanOptions& options = {});

struct CovSurface {
    Grid1D grid_s;
    Grid1D grid_t;
    /// Final surface (M_s, M_t).
    RowMatrix values;
    /// Unsmoothed estimate; NaN where no observation covers the pair.
    RowMatrix raw;
    /// Number of observations contributing to each raw cell.
    RowMatrix counts;
    bool diagonal_corrected = false;
    /// Estimated measurement-error variance when the diagonal was corrected.
    std::optional<double> noise_variance;
    /// Bandwidth of the 2-D smoother, when it ran.
    std::optional<double> bandwidth;
};

struct CovarianceOptions {
    /// Replace the diagonal (and cells with fewer than two contributors) by a
    /// local linear smooth of the off-diagonal raw surface.
    bool smooth_diagonal = true;
    smooth::Kernel kernel = smooth::Kernel::epanechnikov;
    /// Cross-validated when unset.
    std::optional<double> bandwidth;
    std::optional<smooth::SmoothSpec> presmooth;
};

/// Divisor is the number of contributing observations per cell (N for complete data).
CovSurface estimate_covariance(const DenseFD& fd, const CovarianceOptions& options = {});
CovSurface estimate_covariance(const IrregularFD& fd, const CovarianceOptions& options = {});
CovSurface estimate_covariance(const UnivariateFD& fd, const CovarianceOptions& options = {});

/// N^-1 sum X_p(s) X_q(t) - mu_p(s) mu_q(t) on the product of the two grids.
CovSurface cross_covariance(const UnivariateFD& fd_p, const UnivariateFD& fd_q);

/// Eigenpairs of the covariance operator under trapezoid quadrature,
/// eigenvalues non-increasing. Eigenfunctions are L2-orthonormal on the grid
/// and scaled so their largest-magnitude entry is positive.
struct Spectrum {
    Eigen::VectorXd values;
    /// (M, M): row j is the j-th eigenfunction.
    RowMatrix functions;
    /// Negative eigenvalues set to zero.
    std::size_t n_clipped = 0;
};

Spectrum covariance_spectrum(const CovSurface& cov);

/// Observations as an (N, M) matrix on a 1-D grid with kMissing for absent cells,
/// optionally smoothed within each observation's own range.
struct GriddedData {
    Grid1D grid;
    RowMatrix values;
};

GriddedData gridded(const UnivariateFD& fd, const std::optional<smooth::SmoothSpec>& presmooth = {});

/// Flips the sign of `row` so that its largest-magnitude entry is positive.
void fix_sign(Eigen::Ref<Eigen::RowVectorXd> row);

}  // namespace fundata::moments
