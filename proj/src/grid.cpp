#include "fundata/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fundata/errors.hpp"

namespace fundata {

Grid1D::Grid1D(std::vector<double> points) : points_(std::move(points)) {
    if (points_.empty()) {
        throw ValidationError("grid must contain at least one point");
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!std::isfinite(points_[i])) {
            throw ValidationError("grid point " + std::to_string(i) + " is not finite");
        }
        if (i > 0 && !(points_[i] > points_[i - 1])) {
            throw ValidationError("grid must be strictly increasing (violated at index " +
                                  std::to_string(i) + ")");
        }
    }
}

Grid1D Grid1D::linspace(double start, double stop, std::size_t count) {
    if (count == 0) {
        throw ValidationError("linspace needs count >= 1");
    }
    std::vector<double> p(count);
    if (count == 1) {
        p[0] = start;
        return Grid1D(std::move(p));
    }
    const double step = (stop - start) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        p[i] = start + step * static_cast<double>(i);
    }
    p.back() = stop;
    return Grid1D(std::move(p));
}

Grid1D Grid1D::standardized() const {
    std::vector<double> p(points_.size(), 0.0);
    if (points_.size() > 1) {
        const double lo = points_.front();
        const double span = points_.back() - lo;
        for (std::size_t i = 0; i < p.size(); ++i) {
            p[i] = (points_[i] - lo) / span;
        }
        p.front() = 0.0;
        p.back() = 1.0;
    }
    return Grid1D(std::move(p));
}

std::size_t Grid1D::find(double t) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), t);
    if (it != points_.end() && *it == t) {
        return static_cast<std::size_t>(it - points_.begin());
    }
    return points_.size();
}

std::vector<double> trapezoid_weights(std::span<const double> points) {
    const std::size_t m = points.size();
    std::vector<double> w(m, 0.0);
    if (m == 1) {
        w[0] = 1.0;
        return w;
    }
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const double half = 0.5 * (points[i + 1] - points[i]);
        w[i] += half;
        w[i + 1] += half;
    }
    return w;
}

Grid1D union_grid(std::span<const Grid1D> grids) {
    std::vector<double> all;
    for (const auto& g : grids) {
        all.insert(all.end(), g.points().begin(), g.points().end());
    }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    return Grid1D(std::move(all));
}

double interpolate(const Grid1D& grid, std::span<const double> values, double t) {
    const auto pts = grid.points();
    const double tol = 1e-12 * std::max(1.0, std::abs(grid.length()));
    if (t < pts.front() - tol || t > pts.back() + tol) {
        throw ValidationError("interpolation point " + std::to_string(t) +
                              " outside grid range");
    }
    if (pts.size() == 1) {
        return values[0];
    }
    auto it = std::upper_bound(pts.begin(), pts.end(), t);
    std::size_t hi = static_cast<std::size_t>(it - pts.begin());
    hi = std::clamp<std::size_t>(hi, 1, pts.size() - 1);
    const std::size_t lo = hi - 1;
    if (t == pts[lo]) return values[lo];
    if (t == pts[hi]) return values[hi];
    const double a = (t - pts[lo]) / (pts[hi] - pts[lo]);
    return (1.0 - a) * values[lo] + a * values[hi];
}

Grid1D parse_grid_spec(const std::string& spec) {
    std::istringstream in(spec);
    std::string a, b, c;
    if (!std::getline(in, a, ':') || !std::getline(in, b, ':') || !std::getline(in, c)) {
        throw ValidationError("grid spec must look like start:stop:count, got '" + spec + "'");
    }
    try {
        std::size_t pos = 0;
        const double start = std::stod(a, &pos);
        if (pos != a.size()) throw std::invalid_argument(a);
        const double stop = std::stod(b, &pos);
        if (pos != b.size()) throw std::invalid_argument(b);
        const long count = std::stol(c, &pos);
        if (pos != c.size() || count < 1) throw std::invalid_argument(c);
        if (count > 1 && !(stop > start)) throw std::invalid_argument(spec);
        return Grid1D::linspace(start, stop, static_cast<std::size_t>(count));
    } catch (const std::logic_error&) {
        throw ValidationError("malformed grid spec '" + spec + "'");
    }
}

}  // namespace fundata
