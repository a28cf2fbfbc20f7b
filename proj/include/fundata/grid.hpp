#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fundata {

/// Strictly increasing, finite, non-empty set of sampling points for one dimension.
class Grid1D {
public:
    explicit Grid1D(std::vector<double> points);

    /// `count` points from `start` to `stop`, both endpoints included.
    static Grid1D linspace(double start, double stop, std::size_t count);

    std::size_t size() const noexcept { return points_.size(); }
    std::span<const double> points() const noexcept { return points_; }
    const std::vector<double>& vector() const noexcept { return points_; }
    double operator[](std::size_t i) const { return points_[i]; }
    double front() const { return points_.front(); }
    double back() const { return points_.back(); }
    double length() const { return points_.back() - points_.front(); }

    /// Affine map onto [0,1]; a single point maps to 0.
    Grid1D standardized() const;

    /// Index of `t` when it is exactly a grid point, otherwise size().
    std::size_t find(double t) const;

    bool operator==(const Grid1D&) const = default;

private:
    std::vector<double> points_;
};

/// Composite trapezoid weights. A single-point grid gets weight 1 so that
/// inner products on degenerate grids reduce to point evaluation.
std::vector<double> trapezoid_weights(std::span<const double> points);

/// Sorted union of several grids.
Grid1D union_grid(std::span<const Grid1D> grids);

/// Linear interpolation of `values` (defined on `grid`) at `t`. Points outside
/// the grid range raise ValidationError.
double interpolate(const Grid1D& grid, std::span<const double> values, double t);

/// Parses "start:stop:count".
Grid1D parse_grid_spec(const std::string& spec);

}  // namespace fundata
