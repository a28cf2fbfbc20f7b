#include <exception>
#include <limits>

#include <omp.h>

#include "kernels_detail.hpp"

namespace fundata::kernels::omp {

namespace {

// Runs body(i) for i in [0, count) across threads. The exception of the lowest
// failing index is rethrown after the loop so failures are reproducible.
template <class Body>
void parallel_for(std::size_t count, Body&& body, int schedule_chunk = 1) {
    std::exception_ptr error;
    long error_index = std::numeric_limits<long>::max();
    const auto n = static_cast<long>(count);
#pragma omp parallel for schedule(dynamic, schedule_chunk)
    for (long i = 0; i < n; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(fundata_parallel_error)
            {
                if (i < error_index) {
                    error_index = i;
                    error = std::current_exception();
                }
            }
        }
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace

void local_poly_batch(std::span<const CurveTask> curves, std::span<const double> points, int degree,
                      smooth::Kernel kernel, RowMatrix& out) {
    out.resize(static_cast<Eigen::Index>(curves.size()), static_cast<Eigen::Index>(points.size()));
    parallel_for(curves.size(), [&](std::size_t n) {
        detail::local_poly_row(curves[n], n, points, degree, kernel, out.row(static_cast<Eigen::Index>(n)).data());
    });
}

void cross_products(const RowMatrix& a, const Eigen::VectorXd& mean_a, const RowMatrix& b,
                    const Eigen::VectorXd& mean_b, bool symmetric, RowMatrix& sums, RowMatrix& counts) {
    detail::check_shapes(a, mean_a, b, mean_b);
    sums.resize(a.cols(), b.cols());
    counts.resize(a.cols(), b.cols());
    parallel_for(static_cast<std::size_t>(a.cols()), [&](std::size_t i) {
        const auto ii = static_cast<Eigen::Index>(i);
        detail::cross_product_row(a, mean_a, b, mean_b, i, symmetric ? i : 0, sums.row(ii).data(),
                                  counts.row(ii).data());
    });
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
    parallel_for(points.size(), [&](std::size_t k) {
        out[k] = detail::local_linear_2d_at(data, points[k].s, points[k].t, bandwidth, kernel);
    }, 16);
}

void local_linear_2d_loo(const Scatter2D& data, std::span<const std::size_t> indices, double bandwidth,
                         smooth::Kernel kernel, std::vector<double>& out) {
    out.assign(indices.size(), 0.0);
    parallel_for(indices.size(), [&](std::size_t k) {
        const std::size_t m = indices[k];
        out[k] = detail::local_linear_2d_at(data, data.s[m], data.t[m], bandwidth, kernel, m);
    }, 16);
}

void trapezoid_scores(const RowMatrix& x, const Eigen::VectorXd& mean, const RowMatrix& functions,
                      const Grid1D& grid, RowMatrix& out) {
    const auto weights = trapezoid_weights(grid.points());
    out.resize(x.rows(), functions.rows());
    parallel_for(static_cast<std::size_t>(x.rows()), [&](std::size_t n) {
        detail::score_row(x, mean, functions, grid, weights, n, out.row(static_cast<Eigen::Index>(n)).data());
    }, 16);
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace fundata::kernels::omp
