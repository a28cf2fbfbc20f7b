#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "fundata/grid.hpp"

namespace fundata {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Sentinel for an unobserved cell of a dense object. Every valid measurement
/// is finite, so the sentinel never compares equal to one.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) noexcept { return std::isnan(v); }

/// A named axis of the input domain.
struct Dimension {
    std::string name;
    Grid1D grid;

    bool operator==(const Dimension&) const = default;
};

using DenseArgvals = std::vector<Dimension>;

/// Default axis name for dimension `k` ("input_dim_k").
std::string default_dim_name(std::size_t k);

/// Observations on one shared rectangular grid (1-D curves or 2-D images).
///
/// Values are stored row-major with shape (N, M1[, M2]); the cells of one
/// observation are contiguous. Missing cells hold kMissing.
class DenseFD {
public:
    DenseFD(DenseArgvals argvals, std::vector<double> values);

    /// 1-D convenience: one row per observation.
    DenseFD(Grid1D grid, const RowMatrix& values);

    std::size_t n_obs() const noexcept { return n_obs_; }
    std::size_t n_dim() const noexcept { return argvals_.size(); }
    /// Number of cells per observation (product of grid lengths).
    std::size_t n_cells() const noexcept { return cells_; }
    const DenseArgvals& argvals() const noexcept { return argvals_; }
    const Grid1D& grid(std::size_t dim = 0) const { return argvals_.at(dim).grid; }
    std::vector<std::size_t> shape() const;

    std::span<const double> values() const noexcept { return values_; }
    std::span<const double> observation(std::size_t n) const {
        return {values_.data() + n * cells_, cells_};
    }
    double at(std::size_t n, std::size_t i) const { return values_[n * cells_ + i]; }
    double at(std::size_t n, std::size_t i, std::size_t j) const {
        return values_[n * cells_ + i * argvals_[1].grid.size() + j];
    }

    /// (N, n_cells) view of the values.
    Eigen::Map<const RowMatrix> matrix() const {
        return {values_.data(), static_cast<Eigen::Index>(n_obs_), static_cast<Eigen::Index>(cells_)};
    }

    bool has_missing() const;
    DenseArgvals argvals_stand() const;

private:
    DenseArgvals argvals_;
    std::vector<double> values_;
    std::size_t n_obs_ = 0;
    std::size_t cells_ = 0;
};

/// One irregularly sampled observation: a grid per dimension and the
/// row-major tensor of values on those grids.
struct IrregularObs {
    std::vector<Grid1D> grids;
    std::vector<double> values;
};

/// argvals as dimension-name -> (observation key -> grid).
using IrregularArgvals = std::vector<std::pair<std::string, std::map<std::size_t, Grid1D>>>;

/// Observations on their own grids, without missing values. Observation keys
/// are renumbered to 0..N-1 in key order on construction.
class IrregularFD {
public:
    IrregularFD(std::vector<std::string> dim_names, std::vector<IrregularObs> obs);

    /// Builds from keyed maps; the key sets must agree across every map.
    static IrregularFD from_maps(const IrregularArgvals& argvals,
                                 const std::map<std::size_t, std::vector<double>>& values);

    std::size_t n_obs() const noexcept { return obs_.size(); }
    std::size_t n_dim() const noexcept { return dim_names_.size(); }
    const std::vector<std::string>& dim_names() const noexcept { return dim_names_; }
    const IrregularObs& obs(std::size_t n) const { return obs_.at(n); }
    const std::vector<IrregularObs>& observations() const noexcept { return obs_; }

    /// Sorted union of all per-observation grids along `dim`.
    Grid1D union_grid(std::size_t dim = 0) const;

    IrregularArgvals argvals() const;
    IrregularArgvals argvals_stand() const;

private:
    std::vector<std::string> dim_names_;
    std::vector<IrregularObs> obs_;
};

using UnivariateFD = std::variant<DenseFD, IrregularFD>;

std::size_t n_obs(const UnivariateFD& fd);
std::size_t n_dim(const UnivariateFD& fd);

/// Ordered list of P components sharing the same number of observations.
class MultivariateFD {
public:
    explicit MultivariateFD(std::vector<UnivariateFD> components);

    std::size_t n_components() const noexcept { return components_.size(); }
    std::size_t n_obs() const;
    const UnivariateFD& operator[](std::size_t p) const { return components_.at(p); }
    const std::vector<UnivariateFD>& components() const noexcept { return components_; }
    auto begin() const { return components_.begin(); }
    auto end() const { return components_.end(); }

    void append(UnivariateFD component);
    void extend(const MultivariateFD& other);
    /// Removes and returns component `p`; the last component cannot be removed.
    UnivariateFD pop(std::size_t p);

private:
    std::vector<UnivariateFD> components_;
};

struct FDSummary {
    std::size_t n_obs = 0;
    /// Per-dimension sampling point counts; the mean count per observation for irregular data.
    std::vector<double> n_points;
    bool n_points_is_mean = false;
    std::size_t n_dim = 0;
    std::pair<double, double> range_obs{0.0, 0.0};
    std::vector<std::pair<double, double>> range_points;
};

FDSummary summary(const DenseFD& fd);
FDSummary summary(const IrregularFD& fd);
FDSummary summary(const UnivariateFD& fd);
std::vector<FDSummary> summary(const MultivariateFD& fd);

/// One-line description, e.g. "Univariate functional data object with 35 observations on a 1-dimensional support."
std::string describe(const UnivariateFD& fd);
std::string describe(const MultivariateFD& fd);

/// Observations [lo, hi).
DenseFD subset(const DenseFD& fd, std::size_t lo, std::size_t hi);
IrregularFD subset(const IrregularFD& fd, std::size_t lo, std::size_t hi);
UnivariateFD subset(const UnivariateFD& fd, std::size_t lo, std::size_t hi);

/// Observations at the given indices, in the given order.
DenseFD select(const DenseFD& fd, std::span<const std::size_t> idx);
IrregularFD select(const IrregularFD& fd, std::span<const std::size_t> idx);
UnivariateFD select(const UnivariateFD& fd, std::span<const std::size_t> idx);
MultivariateFD select(const MultivariateFD& fd, std::span<const std::size_t> idx);

/// Single-observation views of a multivariate object, in order.
std::vector<MultivariateFD> iterate_obs(const MultivariateFD& fd);

/// Stacks observations of objects defined on identical grids (dense) or of any
/// irregular objects.
UnivariateFD concatenate(std::span<const UnivariateFD> parts);
MultivariateFD concatenate(std::span<const MultivariateFD> parts);

/// Drops missing cells per observation. For 2-D objects, grid rows/columns that
/// are entirely missing are dropped; any remaining missing cell is an error.
IrregularFD to_irregular(const DenseFD& fd);

/// Common grid per dimension is the sorted union; absent cells become kMissing.
DenseFD to_dense(const IrregularFD& fd);

/// Cell-by-cell equality where two missing cells compare equal.
bool same_content(const DenseFD& a, const DenseFD& b);
bool same_content(const IrregularFD& a, const IrregularFD& b);

}  // namespace fundata
