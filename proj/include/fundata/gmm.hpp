#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "fundata/functional_data.hpp"

namespace fundata::gmm {

struct GmmOptions {
    std::size_t restarts = 3;
    std::size_t max_iter = 300;
    /// Absolute change of the log-likelihood that stops EM.
    double tolerance = 1e-6;
};

/// Full-covariance Gaussian mixture.
struct GmmModel {
    std::vector<double> weights;
    std::vector<Eigen::VectorXd> means;
    std::vector<Eigen::MatrixXd> covariances;
    double loglik = 0.0;
    std::size_t n_params = 0;
    /// 2 loglik - n_params log(n); larger is better.
    double bic = 0.0;
    std::size_t n_obs = 0;
    /// Log-likelihood after each EM iteration of the retained start.
    std::vector<double> loglik_trace;
    bool converged = false;
    /// Some component carries less mass than d + 1 points, too little for a full covariance.
    bool degenerate = false;

    std::size_t n_components() const { return weights.size(); }
    std::size_t dim() const { return means.empty() ? 0 : static_cast<std::size_t>(means[0].size()); }
};

std::size_t n_parameters(std::size_t k, std::size_t d);

/// EM from k-means++ starts; the non-degenerate start with the highest
/// log-likelihood is kept (a degenerate one only when every start is).
/// Covariance eigenvalues are floored at 1e-6 times the mean per-coordinate
/// variance of the data. Deterministic for a given seed.
GmmModel gmm_fit(const RowMatrix& points, std::size_t k, std::uint64_t seed, const GmmOptions& options = {});

struct Selection {
    std::size_t k_hat = 1;
    /// models[k - 1] has k components.
    std::vector<GmmModel> models;
};

/// Fits K = 1..min(k_max, n) and returns the argmax of bic over non-degenerate
/// models; ties go to the smaller K.
Selection gmm_select_k(const RowMatrix& points, std::size_t k_max, std::uint64_t seed,
                       const GmmOptions& options = {});

/// (n, K) posterior probabilities; rows sum to one.
RowMatrix gmm_posterior(const GmmModel& model, const RowMatrix& points);

/// Log-likelihood of the points under the model.
double gmm_loglik(const GmmModel& model, const RowMatrix& points);

/// argmax of each posterior row; ties go to the lower index.
std::vector<int> gmm_predict(const GmmModel& model, const RowMatrix& points);

}  // namespace fundata::gmm
