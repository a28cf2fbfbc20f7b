#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fundata/parallel.hpp"

namespace fundata::kernels::detail {

inline constexpr std::size_t kNoSkip = std::numeric_limits<std::size_t>::max();

// One element of each batch routine; shared by the serial and omp loops.
void local_poly_row(const CurveTask& curve, std::size_t n, std::span<const double> points, int degree,
                    smooth::Kernel kernel, double* out);

void cross_product_row(const RowMatrix& a, const Eigen::VectorXd& mean_a, const RowMatrix& b,
                       const Eigen::VectorXd& mean_b, std::size_t i, std::size_t j_begin, double* sums,
                       double* counts);

double local_linear_2d_at(const Scatter2D& data, double s0, double t0, double bandwidth, smooth::Kernel kernel,
                          std::size_t skip = kNoSkip);

void score_row(const RowMatrix& x, const Eigen::VectorXd& mean, const RowMatrix& functions, const Grid1D& grid,
               const std::vector<double>& full_weights, std::size_t n, double* out);

void check_shapes(const RowMatrix& a, const Eigen::VectorXd& mean_a, const RowMatrix& b,
                  const Eigen::VectorXd& mean_b);

}  // namespace fundata::kernels::detail
