#include <algorithm>
#include <cmath>
#include <string>

#include "fundata/errors.hpp"
#include "fundata/local_poly.hpp"
#include "kernels_detail.hpp"

namespace fundata::kernels {

namespace detail {

void local_poly_row(const CurveTask& curve, std::size_t n, std::span<const double> points, int degree,
                    smooth::Kernel kernel, double* out) {
    for (std::size_t i = 0; i < points.size(); ++i) {
        try {
            out[i] = smooth::local_poly_estimate(curve.t, curve.y, points[i], degree, curve.bandwidth, kernel);
        } catch (const RankDeficientError& e) {
            throw RankDeficientError(points[i], std::nan(""), "observation " + std::to_string(n) + ": " + e.what());
        }
    }
}

void cross_product_row(const RowMatrix& a, const Eigen::VectorXd& mean_a, const RowMatrix& b,
                       const Eigen::VectorXd& mean_b, std::size_t i, std::size_t j_begin, double* sums,
                       double* counts) {
    const auto ii = static_cast<Eigen::Index>(i);
    const auto cols = static_cast<std::size_t>(b.cols());
    for (std::size_t j = j_begin; j < cols; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        double s = 0.0;
        double c = 0.0;
        for (Eigen::Index n = 0; n < a.rows(); ++n) {
            const double x = a(n, ii);
            const double y = b(n, jj);
            if (is_missing(x) || is_missing(y)) continue;
            s += (x - mean_a(ii)) * (y - mean_b(jj));
            c += 1.0;
        }
        sums[j] = s;
        counts[j] = c;
    }
}

double local_linear_2d_at(const Scatter2D& data, double s0, double t0, double bandwidth, smooth::Kernel kernel,
                          std::size_t skip) {
    const double reach = smooth::compact_support(kernel) ? bandwidth : 8.0 * bandwidth;
    const auto lo = std::lower_bound(data.s.begin(), data.s.end(), s0 - reach) - data.s.begin();
    const auto hi = std::upper_bound(data.s.begin(), data.s.end(), s0 + reach) - data.s.begin();
    Eigen::Matrix3d a = Eigen::Matrix3d::Zero();
    Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
    for (auto k = lo; k < hi; ++k) {
        const auto m = static_cast<std::size_t>(k);
        if (m == skip) continue;
        const double ds = (data.s[m] - s0) / bandwidth;
        const double dt = (data.t[m] - t0) / bandwidth;
        if (std::abs(dt) > reach / bandwidth) continue;
        const double w = data.w[m] * smooth::kernel_eval(kernel, ds) * smooth::kernel_eval(kernel, dt);
        if (w <= 0.0) continue;
        const Eigen::Vector3d u(1.0, ds, dt);
        a.noalias() += w * u * u.transpose();
        rhs.noalias() += w * data.z[m] * u;
    }
    const double trace = a.trace();
    if (!(trace > 0.0)) return std::nan("");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig;
    eig.computeDirect(a);
    if (eig.eigenvalues()(0) <= 1e-10 * trace / 3.0) return std::nan("");
    const Eigen::Vector3d theta = eig.eigenvectors() *
                                  (eig.eigenvectors().transpose() * rhs).cwiseQuotient(eig.eigenvalues());
    return theta(0);
}

void score_row(const RowMatrix& x, const Eigen::VectorXd& mean, const RowMatrix& functions, const Grid1D& grid,
               const std::vector<double>& full_weights, std::size_t n, double* out) {
    const auto nn = static_cast<Eigen::Index>(n);
    const auto m = static_cast<std::size_t>(x.cols());
    bool complete = true;
    for (std::size_t i = 0; i < m && complete; ++i) complete = !is_missing(x(nn, static_cast<Eigen::Index>(i)));
    std::vector<double> pts;
    std::vector<std::size_t> idx;
    std::vector<double> weights;
    if (complete) {
        weights = full_weights;
        idx.resize(m);
        for (std::size_t i = 0; i < m; ++i) idx[i] = i;
    } else {
        for (std::size_t i = 0; i < m; ++i) {
            if (is_missing(x(nn, static_cast<Eigen::Index>(i)))) continue;
            idx.push_back(i);
            pts.push_back(grid[i]);
        }
        if (idx.size() < 2) {
            throw ValidationError("observation " + std::to_string(n) +
                                  " has fewer than two observed points for numerical integration");
        }
        weights = trapezoid_weights(pts);
    }
    for (Eigen::Index j = 0; j < functions.rows(); ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < idx.size(); ++k) {
            const auto i = static_cast<Eigen::Index>(idx[k]);
            s += weights[k] * (x(nn, i) - mean(i)) * functions(j, i);
        }
        out[j] = s;
    }
}

void check_shapes(const RowMatrix& a, const Eigen::VectorXd& mean_a, const RowMatrix& b,
                  const Eigen::VectorXd& mean_b) {
    if (a.rows() != b.rows() || a.cols() != mean_a.size() || b.cols() != mean_b.size()) {
        throw ValidationError("cross_products: inconsistent shapes");
    }
}

}  // namespace detail

namespace serial {

void local_poly_batch(std::span<const CurveTask> curves, std::span<const double> points, int degree,
                      smooth::Kernel kernel, RowMatrix& out) {
    out.resize(static_cast<Eigen::Index>(curves.size()), static_cast<Eigen::Index>(points.size()));
    for (std::size_t n = 0; n < curves.size(); ++n) {
        detail::local_poly_row(curves[n], n, points, degree, kernel, out.row(static_cast<Eigen::Index>(n)).data());
    }
}

void cross_products(const RowMatrix& a, const Eigen::VectorXd& mean_a, const RowMatrix& b,
                    const Eigen::VectorXd& mean_b, bool symmetric, RowMatrix& sums, RowMatrix& counts) {
    detail::check_shapes(a, mean_a, b, mean_b);
    sums.resize(a.cols(), b.cols());
    counts.resize(a.cols(), b.cols());
    for (Eigen::Index i = 0; i < a.cols(); ++i) {
        const auto j0 = symmetric ? static_cast<std::size_t>(i) : 0;
        detail::cross_product_row(a, mean_a, b, mean_b, static_cast<std::size_t>(i), j0, sums.row(i).data(),
                                  counts.row(i).data());
    }
    if (symmetric) {
        for (Eigen::Index i = 0; i < a.cols(); ++i) {
            for (Eigen::Index j = 0; j < i; ++j) {
                sums(i, j) = sums(j, i);
                counts(i, j) = counts(j, i);
            }
        }
    }
}

void local_linear_2d(const Scatter2D& data, std::span<const Point2D> points, double bandwidth,
                     smooth::Kernel kernel, std::vector<double>& out) {
    out.assign(points.size(), 0.0);
    for (std::size_t k = 0; k < points.size(); ++k) {
        out[k] = detail::local_linear_2d_at(data, points[k].s, points[k].t, bandwidth, kernel);
    }
}

void local_linear_2d_loo(const Scatter2D& data, std::span<const std::size_t> indices, double bandwidth,
                         smooth::Kernel kernel, std::vector<double>& out) {
    out.assign(indices.size(), 0.0);
    for (std::size_t k = 0; k < indices.size(); ++k) {
        const std::size_t m = indices[k];
        out[k] = detail::local_linear_2d_at(data, data.s[m], data.t[m], bandwidth, kernel, m);
    }
}

void trapezoid_scores(const RowMatrix& x, const Eigen::VectorXd& mean, const RowMatrix& functions,
                      const Grid1D& grid, RowMatrix& out) {
    const auto weights = trapezoid_weights(grid.points());
    out.resize(x.rows(), functions.rows());
    for (Eigen::Index n = 0; n < x.rows(); ++n) {
        detail::score_row(x, mean, functions, grid, weights, static_cast<std::size_t>(n), out.row(n).data());
    }
}

}  // namespace serial

}  // namespace fundata::kernels
