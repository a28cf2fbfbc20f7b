#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fundata/functional_data.hpp"

namespace fundata::pca {

/// Third-order tensor (N, Sx, Sy) stored observation-major, each slice row-major.
struct Tensor3 {
    std::size_t n = 0, sx = 0, sy = 0;
    std::vector<double> data;

    double& operator()(std::size_t i, std::size_t a, std::size_t b) { return data[(i * sx + a) * sy + b]; }
    double operator()(std::size_t i, std::size_t a, std::size_t b) const { return data[(i * sx + a) * sy + b]; }
};

struct FcptpaOptions {
    /// Log-spaced candidates for the smoothing parameters; {0, 0} disables smoothing on that axis.
    std::pair<double, double> alpha_range_v{0.0, 0.0};
    std::pair<double, double> alpha_range_w{0.0, 0.0};
    std::size_t n_alpha = 15;
    double tolerance = 1e-8;
    std::size_t max_iter = 500;
    /// When positive, stop adding components once sum lambda_j^2 reaches this
    /// share of the squared Frobenius norm of the input.
    double stop_share = 0.0;
};

/// X ~ sum_j lambda_j u_j (x) v_j (x) w_j with unit-norm u, v, w, lambda_j >= 0 sorted
/// by decreasing lambda. Components of a zero residual get lambda = 0 and
/// are flagged degenerate.
struct CpDecomposition {
    Eigen::VectorXd lambda;
    Eigen::MatrixXd u;  // (N, J)
    Eigen::MatrixXd v;  // (Sx, J)
    Eigen::MatrixXd w;  // (Sy, J)
    std::vector<double> alpha_v;
    std::vector<double> alpha_w;
    std::vector<bool> degenerate;
    std::vector<std::size_t> iterations;
};

/// Rank-wise penalized tensor power iterations with deflation.
CpDecomposition fcptpa(const Tensor3& x, std::size_t n_components, const FcptpaOptions& options = {});

struct FcptpaModel {
    DenseArgvals argvals;
    /// Mean image, row-major (Sx * Sy).
    Eigen::VectorXd mean;
    CpDecomposition decomposition;
    /// (J, Sx * Sy) eigenimages v_j (x) w_j scaled to unit L2 norm under the
    /// 2-D trapezoid rule.
    RowMatrix eigenimages;
    /// lambda_j u_j for the training observations, (N, J).
    RowMatrix training_scores;
    double n_comp = 0.0;

    std::size_t n_components() const { return static_cast<std::size_t>(eigenimages.rows()); }
};

/// Centers the images and decomposes them. A fractional n_comp keeps the
/// smallest prefix whose sum of lambda_j^2 reaches that share of the squared
/// norm of the centered data (capped at min(N, Sx, Sy) components).
FcptpaModel fcptpa_fit(const DenseFD& fd, double n_comp, const FcptpaOptions& options = {});

/// Weighted least-squares coefficients of the centered images on the eigenimages.
RowMatrix fcptpa_scores(const FcptpaModel& model, const DenseFD& fd);

DenseFD fcptpa_inverse(const FcptpaModel& model, const RowMatrix& scores);

}  // namespace fundata::pca
