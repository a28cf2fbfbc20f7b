#include "fundata/moments.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <limits>
#include <vector>

#include "fundata/errors.hpp"
#include "fundata/parallel.hpp"

namespace fundata::moments {

namespace {

constexpr std::size_t kCvSubsample = 2000;
constexpr std::size_t kCvCandidates = 8;

std::pair<std::vector<double>, std::vector<double>> observed_pairs(const Grid1D& grid, std::span<const double> row) {
    std::vector<double> t, y;
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (is_missing(row[i])) continue;
        t.push_back(grid[i]);
        y.push_back(row[i]);
    }
    return {std::move(t), std::move(y)};
}

Eigen::VectorXd column_means(const RowMatrix& x) {
    Eigen::VectorXd mean(x.cols());
    for (Eigen::Index i = 0; i < x.cols(); ++i) {
        double s = 0.0;
        std::size_t c = 0;
        for (Eigen::Index n = 0; n < x.rows(); ++n) {
            if (is_missing(x(n, i))) continue;
            s += x(n, i);
            ++c;
        }
        if (c == 0) throw ValidationError("no observation covers grid point " + std::to_string(i));
        mean(i) = s / static_cast<double>(c);
    }
    return mean;
}

DenseFD as_dense(const GriddedData& g, const Eigen::VectorXd& mean, const std::string& name) {
    return DenseFD(DenseArgvals{{name, g.grid}}, std::vector<double>(mean.data(), mean.data() + mean.size()));
}

std::string dim_name(const UnivariateFD& fd) {
    if (const auto* d = std::get_if<DenseFD>(&fd)) return d->argvals()[0].name;
    return std::get<IrregularFD>(fd).dim_names()[0];
}

double max_gap(const Grid1D& grid) {
    double g = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) g = std::max(g, grid[i] - grid[i - 1]);
    return g;
}

// Cross-validated bandwidth of the 2-D local linear smoother on a
// deterministic stride subsample of the scatter.
double cv_bandwidth_2d(const kernels::Scatter2D& data, const Grid1D& grid, smooth::Kernel kernel,
                       std::span<const kernels::Point2D> targets) {
    const double length = grid.length();
    double lo = 2.0 * max_gap(grid);
    const double hi = std::max(length / 4.0, lo);
    lo = std::min(lo, hi);
    std::vector<std::size_t> idx;
    const std::size_t stride = std::max<std::size_t>(1, (data.size() + kCvSubsample - 1) / kCvSubsample);
    for (std::size_t k = 0; k < data.size(); k += stride) idx.push_back(k);

    double best_h = std::numeric_limits<double>::quiet_NaN();
    double best_err = std::numeric_limits<double>::infinity();
    std::vector<double> pred, fitted;
    for (std::size_t c = 0; c < kCvCandidates; ++c) {
        const double f = static_cast<double>(c) / static_cast<double>(kCvCandidates - 1);
        const double h = lo == hi ? hi : std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo)));
        kernels::omp::local_linear_2d_loo(data, idx, h, kernel, pred);
        double err = 0.0, wsum = 0.0;
        bool ok = true;
        for (std::size_t k = 0; k < idx.size(); ++k) {
            if (std::isnan(pred[k])) {
                ok = false;
                break;
            }
            const double r = data.z[idx[k]] - pred[k];
            err += data.w[idx[k]] * r * r;
            wsum += data.w[idx[k]];
        }
        if (!ok) continue;
        kernels::omp::local_linear_2d(data, targets, h, kernel, fitted);
        if (std::any_of(fitted.begin(), fitted.end(), [](double v) { return std::isnan(v); })) continue;
        err /= wsum;
        if (err < best_err) {
            best_err = err;
            best_h = h;
        }
    }
    if (std::isnan(best_h)) {
        throw RankDeficientError(grid.front(), 0.0, "covariance smoother is singular for every candidate bandwidth");
    }
    return best_h;
}

}  // namespace

void fix_sign(Eigen::Ref<Eigen::RowVectorXd> row) {
    if (row.size() == 0) return;
    Eigen::Index arg = 0;
    row.cwiseAbs().maxCoeff(&arg);
    if (row(arg) < 0.0) row = -row;
}

GriddedData gridded(const UnivariateFD& fd, const std::optional<smooth::SmoothSpec>& presmooth) {
    if (n_dim(fd) != 1) throw ValidationError("moment estimation is only defined for 1-D data");
    std::vector<std::vector<double>> ts, ys;
    Grid1D grid = Grid1D({0.0});
    RowMatrix values;
    if (const auto* d = std::get_if<DenseFD>(&fd)) {
        grid = d->grid(0);
        values = d->matrix();
        if (!presmooth) return {grid, values};
        for (std::size_t n = 0; n < d->n_obs(); ++n) {
            auto [t, y] = observed_pairs(grid, d->observation(n));
            ts.push_back(std::move(t));
            ys.push_back(std::move(y));
        }
    } else {
        const auto& irr = std::get<IrregularFD>(fd);
        const DenseFD dense = to_dense(irr);
        grid = dense.grid(0);
        values = dense.matrix();
        if (!presmooth) return {grid, values};
        for (const auto& o : irr.observations()) {
            ts.push_back(o.grids[0].vector());
            ys.push_back(o.values);
        }
    }
    const auto& spec = *presmooth;
    for (std::size_t n = 0; n < ts.size(); ++n) {
        if (ts[n].size() < static_cast<std::size_t>(spec.degree) + 2) continue;
        const double h = smooth::resolve_bandwidth(spec.bandwidth, ts[n], ys[n], spec.degree, spec.kernel);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto ni = static_cast<Eigen::Index>(n);
            const auto ii = static_cast<Eigen::Index>(i);
            if (grid[i] < ts[n].front() || grid[i] > ts[n].back()) {
                values(ni, ii) = kMissing;
                continue;
            }
            values(ni, ii) = smooth::local_poly_estimate(ts[n], ys[n], grid[i], spec.degree, h, spec.kernel);
        }
    }
    return {grid, values};
}

DenseFD estimate_mean(const UnivariateFD& fd, const MeanOptions& options) {
    const auto g = gridded(fd, options.presmooth);
    return as_dense(g, column_means(g.values), dim_name(fd));
}

DenseFD estimate_mean(const DenseFD& fd, const MeanOptions& options) {
    return estimate_mean(UnivariateFD(fd), options);
}

DenseFD estimate_mean(const IrregularFD& fd, const MeanOptions& options) {
    return estimate_mean(UnivariateFD(fd), options);
}

CovSurface estimate_covariance(const UnivariateFD& fd, const CovarianceOptions& options) {
    if (n_obs(fd) < 2) throw ValidationError("covariance estimation needs at least two observations");
    const auto g = gridded(fd, options.presmooth);
    const Eigen::VectorXd mean = column_means(g.values);
    RowMatrix sums, counts;
    kernels::omp::cross_products(g.values, mean, g.values, mean, true, sums, counts);
    const auto m = static_cast<Eigen::Index>(g.grid.size());
    RowMatrix raw(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            raw(i, j) = counts(i, j) > 0.0 ? sums(i, j) / counts(i, j) : std::numeric_limits<double>::quiet_NaN();
        }
    }
    CovSurface cov{g.grid, g.grid, raw, raw, counts, false, std::nullopt, std::nullopt};
    if (!options.smooth_diagonal) {
        if ((counts.array() == 0.0).any()) {
            throw ValidationError("some grid pairs are never observed together; enable diagonal smoothing");
        }
        return cov;
    }

    kernels::Scatter2D scatter;
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            if (i == j || counts(i, j) < 2.0) continue;
            scatter.s.push_back(g.grid[static_cast<std::size_t>(i)]);
            scatter.t.push_back(g.grid[static_cast<std::size_t>(j)]);
            scatter.z.push_back(raw(i, j));
            scatter.w.push_back(counts(i, j));
        }
    }
    if (scatter.size() < 3) throw ValidationError("too few off-diagonal covariance cells to smooth");
    std::vector<kernels::Point2D> points;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> cells;
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = i; j < m; ++j) {
            if (i != j && counts(i, j) >= 2.0) continue;
            points.push_back({g.grid[static_cast<std::size_t>(i)], g.grid[static_cast<std::size_t>(j)]});
            cells.emplace_back(i, j);
        }
    }
    const double h =
        options.bandwidth ? *options.bandwidth : cv_bandwidth_2d(scatter, g.grid, options.kernel, points);
    if (!(h > 0.0)) throw ValidationError("covariance bandwidth must be positive");
    std::vector<double> smoothed;
    kernels::omp::local_linear_2d(scatter, points, h, options.kernel, smoothed);
    for (std::size_t k = 0; k < cells.size(); ++k) {
        if (std::isnan(smoothed[k])) {
            throw RankDeficientError(points[k].s, 0.0,
                                     "covariance smoother is singular at t=" + std::to_string(points[k].t));
        }
        const auto [i, j] = cells[k];
        cov.values(i, j) = smoothed[k];
        cov.values(j, i) = smoothed[k];
    }

    const double lo = g.grid.front() + 0.25 * g.grid.length();
    const double hi = g.grid.back() - 0.25 * g.grid.length();
    double total = 0.0;
    std::size_t used = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
        const double t = g.grid[static_cast<std::size_t>(i)];
        if (t < lo || t > hi || std::isnan(raw(i, i))) continue;
        total += std::max(0.0, raw(i, i) - cov.values(i, i));
        ++used;
    }
    cov.noise_variance = used > 0 ? total / static_cast<double>(used) : 0.0;
    cov.diagonal_corrected = true;
    cov.bandwidth = h;
    return cov;
}

CovSurface estimate_covariance(const DenseFD& fd, const CovarianceOptions& options) {
    return estimate_covariance(UnivariateFD(fd), options);
}

CovSurface estimate_covariance(const IrregularFD& fd, const CovarianceOptions& options) {
    return estimate_covariance(UnivariateFD(fd), options);
}

CovSurface cross_covariance(const UnivariateFD& fd_p, const UnivariateFD& fd_q) {
    if (n_obs(fd_p) != n_obs(fd_q)) {
        throw ValidationError("cross covariance needs equal numbers of observations (" +
                              std::to_string(n_obs(fd_p)) + " vs " + std::to_string(n_obs(fd_q)) + ")");
    }
    const auto gp = gridded(fd_p);
    const auto gq = gridded(fd_q);
    const Eigen::VectorXd mp = column_means(gp.values);
    const Eigen::VectorXd mq = column_means(gq.values);
    RowMatrix sums, counts;
    kernels::omp::cross_products(gp.values, mp, gq.values, mq, false, sums, counts);
    RowMatrix raw(sums.rows(), sums.cols());
    for (Eigen::Index i = 0; i < raw.rows(); ++i) {
        for (Eigen::Index j = 0; j < raw.cols(); ++j) {
            raw(i, j) = counts(i, j) > 0.0 ? sums(i, j) / counts(i, j) : std::numeric_limits<double>::quiet_NaN();
        }
    }
    return CovSurface{gp.grid, gq.grid, raw, raw, counts, false, std::nullopt, std::nullopt};
}

Spectrum covariance_spectrum(const CovSurface& cov) {
    if (!(cov.grid_s == cov.grid_t)) throw ValidationError("spectrum needs a covariance on a square grid");
    if (!cov.values.allFinite()) throw ValidationError("covariance surface has undefined cells");
    const auto w = trapezoid_weights(cov.grid_s.points());
    const auto m = static_cast<Eigen::Index>(w.size());
    Eigen::VectorXd sw(m);
    for (Eigen::Index i = 0; i < m; ++i) sw(i) = std::sqrt(w[static_cast<std::size_t>(i)]);
    Eigen::MatrixXd b = sw.asDiagonal() * Eigen::MatrixXd(cov.values) * sw.asDiagonal();
    b = 0.5 * (b + b.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b);
    if (eig.info() != Eigen::Success) throw Error("covariance eigendecomposition failed");
    Spectrum out;
    out.values.resize(m);
    out.functions.resize(m, m);
    for (Eigen::Index k = 0; k < m; ++k) {
        const Eigen::Index src = m - 1 - k;
        double lambda = eig.eigenvalues()(src);
        if (lambda < 0.0) {
            lambda = 0.0;
            ++out.n_clipped;
        }
        out.values(k) = lambda;
        out.functions.row(k) = eig.eigenvectors().col(src).cwiseQuotient(sw).transpose();
        fix_sign(out.functions.row(k));
    }
    return out;
}

}  // namespace fundata::moments
