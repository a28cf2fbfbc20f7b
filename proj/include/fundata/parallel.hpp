#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fundata/functional_data.hpp"
#include "fundata/kernel.hpp"

// Hot loops of the library in two flavours: `serial` is the reference and
// `omp` splits the outer loop across OpenMP threads. Both evaluate every output
// element with the same summation order, so results agree bit for bit.
namespace fundata::kernels {

struct CurveTask {
    std::span<const double> t;
    std::span<const double> y;
    double bandwidth = 0.0;
};

/// Scattered surface samples sorted by s.
struct Scatter2D {
    std::vector<double> s;
    std::vector<double> t;
    std::vector<double> z;
    std::vector<double> w;

    std::size_t size() const { return s.size(); }
};

/// Evaluation points of a 2-D smoother.
struct Point2D {
    double s = 0.0;
    double t = 0.0;
};

namespace serial {

/// out(n, i) = local polynomial estimate of curve n at points[i]. A rank
/// failure is rethrown naming the observation.
void local_poly_batch(std::span<const CurveTask> curves, std::span<const double> points, int degree,
                      smooth::Kernel kernel, RowMatrix& out);

/// sums(i, j) = sum over n with both cells observed of
/// (a(n, i) - mean_a(i)) (b(n, j) - mean_b(j)); counts(i, j) the number of such n.
/// `symmetric` (a == b) fills the upper triangle and mirrors it.
void cross_products(const RowMatrix& a, const Eigen::VectorXd& mean_a, const RowMatrix& b,
                    const Eigen::VectorXd& mean_b, bool symmetric, RowMatrix& sums, RowMatrix& counts);

/// Weighted local linear fit with a product kernel at each point; NaN where the
/// local normal matrix is singular.
void local_linear_2d(const Scatter2D& data, std::span<const Point2D> points, double bandwidth,
                     smooth::Kernel kernel, std::vector<double>& out);

/// Leave-one-out predictions at data[indices[k]].
void local_linear_2d_loo(const Scatter2D& data, std::span<const std::size_t> indices, double bandwidth,
                         smooth::Kernel kernel, std::vector<double>& out);

/// out(n, j) = trapezoid inner product of (x(n, .) - mean) and functions(j, .)
/// on `grid`. Rows with missing cells use the weights of their observed
/// subgrid and need at least two observed cells.
void trapezoid_scores(const RowMatrix& x, const Eigen::VectorXd& mean, const RowMatrix& functions,
                      const Grid1D& grid, RowMatrix& out);

}  // namespace serial

namespace omp {

void local_poly_batch(std::span<const CurveTask> curves, std::span<const double> points, int degree,
                      smooth::Kernel kernel, RowMatrix& out);
void cross_products(const RowMatrix& a, const Eigen::VectorXd& mean_a, const RowMatrix& b,
                    const Eigen::VectorXd& mean_b, bool symmetric, RowMatrix& sums, RowMatrix& counts);
void local_linear_2d(const Scatter2D& data, std::span<const Point2D> points, double bandwidth,
                     smooth::Kernel kernel, std::vector<double>& out);
void local_linear_2d_loo(const Scatter2D& data, std::span<const std::size_t> indices, double bandwidth,
                         smooth::Kernel kernel, std::vector<double>& out);
void trapezoid_scores(const RowMatrix& x, const Eigen::VectorXd& mean, const RowMatrix& functions,
                      const Grid1D& grid, RowMatrix& out);

/// Threads used by the omp variants.
int max_threads();

}  // namespace omp

}  // namespace fundata::kernels
