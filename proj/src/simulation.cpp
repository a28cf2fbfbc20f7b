#include "fundata/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fundata/errors.hpp"
#include "fundata/rng.hpp"

namespace fundata::sim {

ClusterSpec ClusterSpec::single(const EigenDecay& decay) {
    const auto j = static_cast<Eigen::Index>(decay.values.size());
    ClusterSpec c{{1.0}, Eigen::MatrixXd::Zero(j, 1), Eigen::MatrixXd(j, 1)};
    for (Eigen::Index i = 0; i < j; ++i) c.cluster_std(i, 0) = std::sqrt(decay.values[static_cast<std::size_t>(i)]);
    return c;
}

ClusterSpec ClusterSpec::with_decay(const Eigen::MatrixXd& centers, const EigenDecay& decay) {
    if (static_cast<std::size_t>(centers.rows()) != decay.values.size()) {
        throw ValidationError("centers have " + std::to_string(centers.rows()) +
                              " rows but the decay has " + std::to_string(decay.values.size()) + " values");
    }
    const auto k = static_cast<std::size_t>(centers.cols());
    ClusterSpec c{std::vector<double>(k, 1.0 / static_cast<double>(k)), centers,
                  Eigen::MatrixXd(centers.rows(), centers.cols())};
    for (Eigen::Index i = 0; i < centers.rows(); ++i) {
        c.cluster_std.row(i).setConstant(std::sqrt(decay.values[static_cast<std::size_t>(i)]));
    }
    return c;
}

void ClusterSpec::validate(std::size_t n_functions) const {
    const auto k = static_cast<Eigen::Index>(mixing.size());
    if (k == 0) throw ValidationError("at least one cluster is required");
    const auto j = static_cast<Eigen::Index>(n_functions);
    if (centers.rows() != j || centers.cols() != k) {
        throw ValidationError("centers must have shape (" + std::to_string(j) + ", " + std::to_string(k) +
                              "), got (" + std::to_string(centers.rows()) + ", " +
                              std::to_string(centers.cols()) + ")");
    }
    if (cluster_std.rows() != j || cluster_std.cols() != k) {
        throw ValidationError("cluster_std must have shape (" + std::to_string(j) + ", " +
                              std::to_string(k) + ")");
    }
    double total = 0.0;
    for (double p : mixing) {
        if (!(p > 0.0)) throw ValidationError("mixing proportions must be positive");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ValidationError("mixing proportions must sum to 1");
    if ((cluster_std.array() < 0.0).any() || !cluster_std.allFinite()) {
        throw ValidationError("cluster standard deviations must be finite and non-negative");
    }
}

namespace {

DenseFD dense_from_basis_rows(const Basis& basis, std::vector<double> values) {
    DenseArgvals argvals;
    for (std::size_t d = 0; d < basis.grids.size(); ++d) argvals.push_back({default_dim_name(d), basis.grids[d]});
    return DenseFD(std::move(argvals), std::move(values));
}

}  // namespace

SimOutput simulate_kl(const Basis& basis, const EigenDecay& decay, std::size_t n_obs, std::uint64_t seed) {
    if (decay.values.size() != basis.n_functions()) {
        throw ValidationError("decay has " + std::to_string(decay.values.size()) + " values but the basis has " +
                              std::to_string(basis.n_functions()) + " functions");
    }
    SimOutput out = simulate_kl(basis, ClusterSpec::single(decay), n_obs, seed);
    out.labels.clear();
    return out;
}

SimOutput simulate_kl(const Basis& basis, const ClusterSpec& clusters, std::size_t n_obs, std::uint64_t seed) {
    if (n_obs == 0) throw ValidationError("n_obs must be positive");
    const std::size_t j_count = basis.n_functions();
    clusters.validate(j_count);
    const std::size_t k_count = clusters.n_clusters();

    std::vector<int> labels(n_obs, 0);
    if (k_count > 1) {
        Rng rng(seed, streams::labels);
        std::vector<double> cumulative(k_count);
        std::partial_sum(clusters.mixing.begin(), clusters.mixing.end(), cumulative.begin());
        for (auto& z : labels) {
            const double u = rng.uniform() * cumulative.back();
            const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
            z = static_cast<int>(std::min<std::ptrdiff_t>(it - cumulative.begin(),
                                                          static_cast<std::ptrdiff_t>(k_count) - 1));
        }
    }

    RowMatrix xi(static_cast<Eigen::Index>(n_obs), static_cast<Eigen::Index>(j_count));
    RowMatrix coef(static_cast<Eigen::Index>(n_obs), static_cast<Eigen::Index>(j_count));
    Rng rng(seed, streams::scores);
    for (std::size_t n = 0; n < n_obs; ++n) {
        const auto k = static_cast<Eigen::Index>(labels[n]);
        for (std::size_t j = 0; j < j_count; ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            const auto nn = static_cast<Eigen::Index>(n);
            xi(nn, jj) = clusters.cluster_std(jj, k) * rng.normal();
            coef(nn, jj) = clusters.centers(jj, k) + xi(nn, jj);
        }
    }
    const RowMatrix curves = coef * basis.functions;
    std::vector<double> values(curves.data(), curves.data() + curves.size());
    SimOutput out{dense_from_basis_rows(basis, std::move(values)), std::move(labels), std::move(xi), basis,
                  std::nullopt, std::nullopt};
    return out;
}

BrownianKind parse_brownian_kind(std::string_view name) {
    if (name == "standard") return BrownianKind::standard;
    if (name == "fractional") return BrownianKind::fractional;
    if (name == "geometric") return BrownianKind::geometric;
    throw ValidationError("unknown Brownian kind '" + std::string(name) + "'");
}

SimOutput simulate_brownian(BrownianKind kind, std::size_t n_obs, const Grid1D& grid,
                            const BrownianParams& params, std::uint64_t seed) {
    if (n_obs == 0) throw ValidationError("n_obs must be positive");
    const std::size_t m = grid.size();
    if (kind != BrownianKind::geometric && grid.front() != 0.0) {
        throw ValidationError("standard and fractional Brownian paths need a grid starting at 0");
    }
    if (grid.front() < 0.0) throw ValidationError("Brownian grids must be non-negative");
    Rng rng(seed, streams::paths);
    std::vector<double> values(n_obs * m, 0.0);

    if (kind == BrownianKind::fractional) {
        const double h = params.hurst;
        if (!(h > 0.0 && h < 1.0)) throw ValidationError("hurst must lie in (0, 1)");
        const auto k = static_cast<Eigen::Index>(m - 1);
        if (k > 0) {
            Eigen::MatrixXd cov(k, k);
            for (Eigen::Index i = 0; i < k; ++i) {
                for (Eigen::Index j = 0; j < k; ++j) {
                    const double s = grid[static_cast<std::size_t>(i) + 1];
                    const double t = grid[static_cast<std::size_t>(j) + 1];
                    cov(i, j) = 0.5 * (std::pow(s, 2 * h) + std::pow(t, 2 * h) - std::pow(std::abs(t - s), 2 * h));
                }
            }
            Eigen::LLT<Eigen::MatrixXd> llt(cov);
            if (llt.info() != Eigen::Success) {
                throw ValidationError("fractional Brownian covariance is not positive definite on this grid");
            }
            const Eigen::MatrixXd lower = llt.matrixL();
            Eigen::MatrixXd z(k, static_cast<Eigen::Index>(n_obs));
            for (Eigen::Index n = 0; n < z.cols(); ++n) {
                for (Eigen::Index i = 0; i < k; ++i) z(i, n) = rng.normal();
            }
            const Eigen::MatrixXd paths = lower * z;
            for (std::size_t n = 0; n < n_obs; ++n) {
                for (std::size_t i = 1; i < m; ++i) {
                    values[n * m + i] = paths(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(n));
                }
            }
        }
    } else {
        for (std::size_t n = 0; n < n_obs; ++n) {
            double w = std::sqrt(grid.front()) * (grid.front() > 0.0 ? rng.normal() : 0.0);
            values[n * m] = w;
            for (std::size_t i = 1; i < m; ++i) {
                w += std::sqrt(grid[i] - grid[i - 1]) * rng.normal();
                values[n * m + i] = w;
            }
        }
        if (kind == BrownianKind::geometric) {
            if (!(params.sigma >= 0.0)) throw ValidationError("sigma must be non-negative");
            const double mu = params.drift - 0.5 * params.sigma * params.sigma;
            for (std::size_t n = 0; n < n_obs; ++n) {
                for (std::size_t i = 0; i < m; ++i) {
                    double& v = values[n * m + i];
                    v = params.x0 * std::exp(mu * grid[i] + params.sigma * v);
                }
            }
        }
    }
    return SimOutput{DenseFD(DenseArgvals{{default_dim_name(0), grid}}, std::move(values)), {}, RowMatrix(),
                     std::nullopt, std::nullopt, std::nullopt};
}

void add_noise(SimOutput& sim, const NoiseVariance& variance, std::uint64_t seed) {
    const DenseFD& data = sim.data;
    const std::size_t cells = data.n_cells();
    std::vector<double> sd(cells);
    if (const auto* s = std::get_if<double>(&variance)) {
        if (!(*s >= 0.0)) throw ValidationError("noise variance must be non-negative");
        std::fill(sd.begin(), sd.end(), std::sqrt(*s));
    } else if (const auto* f = std::get_if<std::function<double(double)>>(&variance)) {
        if (data.n_dim() != 1) {
            throw ValidationError("noise variance functions are only defined for 1-D data");
        }
        for (std::size_t i = 0; i < cells; ++i) {
            const double v = (*f)(data.grid(0)[i]);
            if (!(v >= 0.0)) throw ValidationError("noise variance must be non-negative");
            sd[i] = std::sqrt(v);
        }
    } else {
        const auto& vec = std::get<std::vector<double>>(variance);
        if (vec.size() != cells) {
            throw ValidationError("noise variance vector has " + std::to_string(vec.size()) + " entries, expected " +
                                  std::to_string(cells));
        }
        for (std::size_t i = 0; i < cells; ++i) {
            if (!(vec[i] >= 0.0)) throw ValidationError("noise variance must be non-negative");
            sd[i] = std::sqrt(vec[i]);
        }
    }
    Rng rng(seed, streams::noise);
    std::vector<double> values(data.values().begin(), data.values().end());
    for (std::size_t n = 0; n < data.n_obs(); ++n) {
        for (std::size_t i = 0; i < cells; ++i) {
            const double z = rng.normal();
            double& v = values[n * cells + i];
            if (!is_missing(v) && sd[i] > 0.0) v += sd[i] * z;
        }
    }
    sim.noisy_data = DenseFD(data.argvals(), std::move(values));
}

void sparsify(SimOutput& sim, double percentage, double epsilon, std::uint64_t seed) {
    const DenseFD& source = sim.noisy_data ? *sim.noisy_data : sim.data;
    if (source.n_dim() != 1) throw ValidationError("sparsify is only defined for 1-D data");
    if (!(percentage >= 0.0 && percentage <= 1.0) || !(epsilon >= 0.0) || percentage - epsilon < 0.0 ||
        percentage + epsilon > 1.0) {
        throw ValidationError("sparsify needs 0 <= percentage - epsilon and percentage + epsilon <= 1");
    }
    const std::size_t m = source.n_cells();
    if (std::lround((percentage + epsilon) * static_cast<double>(m)) >= static_cast<long>(m)) {
        throw ValidationError("sparsify could remove every sampling point of an observation");
    }
    Rng rng(seed, streams::sparsify);
    const Grid1D& grid = source.grid(0);
    std::vector<IrregularObs> obs;
    obs.reserve(source.n_obs());
    std::vector<std::size_t> order(m);
    for (std::size_t n = 0; n < source.n_obs(); ++n) {
        const double q = rng.uniform(percentage - epsilon, percentage + epsilon);
        const auto remove = static_cast<std::size_t>(std::lround(q * static_cast<double>(m)));
        std::iota(order.begin(), order.end(), std::size_t{0});
        // Partial Fisher-Yates: the first `remove` slots are the dropped points.
        for (std::size_t i = 0; i < remove; ++i) {
            const std::size_t r = i + static_cast<std::size_t>(rng.below(m - i));
            std::swap(order[i], order[r]);
        }
        std::vector<bool> keep(m, true);
        for (std::size_t i = 0; i < remove; ++i) keep[order[i]] = false;
        std::vector<double> pts, vals;
        const auto row = source.observation(n);
        for (std::size_t i = 0; i < m; ++i) {
            if (!keep[i] || is_missing(row[i])) continue;
            pts.push_back(grid[i]);
            vals.push_back(row[i]);
        }
        if (pts.empty()) {
            throw ValidationError("observation " + std::to_string(n) + " lost every sampling point");
        }
        obs.push_back({{Grid1D(std::move(pts))}, std::move(vals)});
    }
    sim.sparse_data = IrregularFD({source.argvals()[0].name}, std::move(obs));
}

}  // namespace fundata::sim
