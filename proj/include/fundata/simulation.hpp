#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "fundata/basis.hpp"
#include "fundata/functional_data.hpp"

namespace fundata::sim {

/// Functional mixture: Z ~ Categorical(mixing), X = mu_Z + sum_j xi_j phi_j
/// with xi_j | Z = k ~ Normal(0, cluster_std(j, k)^2). The cluster means are
/// given by their basis coefficients: mu_k = sum_j centers(j, k) phi_j.
struct ClusterSpec {
    std::vector<double> mixing;
    Eigen::MatrixXd centers;      // (J, K)
    Eigen::MatrixXd cluster_std;  // (J, K)

    std::size_t n_clusters() const { return mixing.size(); }

    /// One zero-mean cluster whose score variances follow `decay`.
    static ClusterSpec single(const EigenDecay& decay);

    /// Equal mixing; standard deviations sqrt(decay) replicated across clusters.
    static ClusterSpec with_decay(const Eigen::MatrixXd& centers, const EigenDecay& decay);

    void validate(std::size_t n_functions) const;
};

struct SimOutput {
    DenseFD data;
    /// Cluster id per observation; empty for unclustered simulations.
    std::vector<int> labels;
    /// Score deviations xi from the cluster centers (N, J), KL simulations only.
    RowMatrix scores;
    std::optional<Basis> basis;
    std::optional<DenseFD> noisy_data;
    std::optional<IrregularFD> sparse_data;
};

SimOutput simulate_kl(const Basis& basis, const EigenDecay& decay, std::size_t n_obs, std::uint64_t seed);
SimOutput simulate_kl(const Basis& basis, const ClusterSpec& clusters, std::size_t n_obs, std::uint64_t seed);

enum class BrownianKind { standard, fractional, geometric };

BrownianKind parse_brownian_kind(std::string_view name);

struct BrownianParams {
    double hurst = 0.5;
    double drift = 0.0;
    double sigma = 1.0;
    double x0 = 1.0;
};

/// standard: W(0) = 0 with independent N(0, dt) increments.
/// fractional: exact Cholesky sampling of Cov = (s^2H + t^2H - |t-s|^2H) / 2.
/// geometric: x0 exp((drift - sigma^2/2) t + sigma W(t)).
SimOutput simulate_brownian(BrownianKind kind, std::size_t n_obs, const Grid1D& grid,
                            const BrownianParams& params, std::uint64_t seed);

/// Scalar (homoscedastic), function of t, or one variance per cell.
using NoiseVariance = std::variant<double, std::function<double(double)>, std::vector<double>>;

/// Fills sim.noisy_data with data + N(0, var(t)) noise, independent across cells.
void add_noise(SimOutput& sim, const NoiseVariance& variance, std::uint64_t seed);

/// Fills sim.sparse_data: each observation loses round(q M) uniformly chosen
/// points, q ~ Uniform(percentage - epsilon, percentage + epsilon). Uses the
/// noisy data when present.
void sparsify(SimOutput& sim, double percentage, double epsilon, std::uint64_t seed);

}  // namespace fundata::sim
