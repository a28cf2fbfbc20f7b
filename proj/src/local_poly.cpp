#include "fundata/local_poly.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fundata/errors.hpp"
#include "fundata/parallel.hpp"

namespace fundata::smooth {

namespace {

void check_pairs(std::span<const double> t, std::span<const double> y, int degree, double bandwidth) {
    if (t.size() != y.size()) throw ValidationError("sampling points and values differ in length");
    if (t.empty()) throw ValidationError("local polynomial fit needs at least one point");
    if (degree < 0) throw ValidationError("degree must be non-negative");
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
        throw ValidationError("bandwidth must be finite and positive");
    }
}

// Normal equations A theta = a, returned through `a_mat` and `a_vec`.
void normal_equations(std::span<const double> t, std::span<const double> y, double t0, int degree, double h,
                      Kernel kernel, std::size_t skip, Eigen::MatrixXd& a_mat, Eigen::VectorXd& a_vec) {
    const auto p = static_cast<Eigen::Index>(degree + 1);
    a_mat.setZero(p, p);
    a_vec.setZero(p);
    Eigen::VectorXd u(p);
    for (std::size_t m = 0; m < t.size(); ++m) {
        if (m == skip) continue;
        const double v = (t[m] - t0) / h;
        const double w = kernel_eval(kernel, v) / h;
        if (w <= 0.0) continue;
        u(0) = 1.0;
        for (Eigen::Index k = 1; k < p; ++k) u(k) = u(k - 1) * v / static_cast<double>(k);
        a_mat.noalias() += w * u * u.transpose();
        a_vec.noalias() += w * y[m] * u;
    }
}

Eigen::VectorXd solve_normal(const Eigen::MatrixXd& a_mat, const Eigen::VectorXd& a_vec, double t0) {
    const double trace = a_mat.trace();
    if (!(trace > 0.0)) throw RankDeficientError(t0, 0.0, "no point has positive kernel weight");
    if (a_mat.rows() == 1) return a_vec / a_mat(0, 0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a_mat);
    const double lambda = eig.eigenvalues()(0);
    if (lambda <= 1e-10 * trace / static_cast<double>(a_mat.rows())) throw RankDeficientError(t0, lambda);
    return eig.eigenvectors() * (eig.eigenvectors().transpose() * a_vec).cwiseQuotient(eig.eigenvalues());
}

std::vector<double> log_space(double lo, double hi, std::size_t count) {
    std::vector<double> out(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double f = count == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(count - 1);
        out[k] = std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo)));
    }
    out.back() = hi;
    return out;
}

}  // namespace

LocalPolyFit local_poly_fit(std::span<const double> t, std::span<const double> y, double t0, int degree,
                            double bandwidth, Kernel kernel) {
    check_pairs(t, y, degree, bandwidth);
    Eigen::MatrixXd a_mat;
    Eigen::VectorXd a_vec;
    normal_equations(t, y, t0, degree, bandwidth, kernel, std::numeric_limits<std::size_t>::max(), a_mat, a_vec);
    LocalPolyFit fit;
    fit.coefficients = solve_normal(a_mat, a_vec, t0);
    fit.estimate = fit.coefficients(0);
    return fit;
}

double local_poly_estimate(std::span<const double> t, std::span<const double> y, double t0, int degree,
                           double bandwidth, Kernel kernel, std::size_t skip) {
    check_pairs(t, y, degree, bandwidth);
    Eigen::MatrixXd a_mat;
    Eigen::VectorXd a_vec;
    normal_equations(t, y, t0, degree, bandwidth, kernel, skip, a_mat, a_vec);
    return solve_normal(a_mat, a_vec, t0)(0);
}

BandwidthMethod parse_bandwidth_method(std::string_view name) {
    if (name == "fixed") return BandwidthMethod::fixed;
    if (name == "knn") return BandwidthMethod::knn;
    if (name == "cv") return BandwidthMethod::cv;
    throw ValidationError("unknown bandwidth method '" + std::string(name) + "'");
}

double estimate_bandwidth(std::span<const double> t, std::span<const double> y, double t0,
                          BandwidthMethod method, int degree, Kernel kernel, std::size_t neighborhood) {
    if (t.size() != y.size()) throw ValidationError("sampling points and values differ in length");
    if (method == BandwidthMethod::fixed) throw ValidationError("a fixed bandwidth has nothing to estimate");
    if (t.size() < static_cast<std::size_t>(degree) + 2) {
        throw ValidationError("bandwidth estimation needs at least degree + 2 points, got " +
                              std::to_string(t.size()));
    }
    if (method == BandwidthMethod::knn) {
        if (neighborhood == 0) throw ValidationError("neighborhood must be positive");
        std::vector<double> left, right;
        for (double v : t) {
            if (v < t0) left.push_back(t0 - v);
            else if (v > t0) right.push_back(v - t0);
        }
        double h = 0.0;
        bool found = false;
        for (auto* side : {&left, &right}) {
            if (side->size() < neighborhood) continue;
            std::nth_element(side->begin(), side->begin() + static_cast<std::ptrdiff_t>(neighborhood - 1),
                             side->end());
            h = std::max(h, (*side)[neighborhood - 1]);
            found = true;
        }
        if (!found) {
            throw ValidationError("fewer than " + std::to_string(neighborhood) +
                                  " sampling points on either side of t0=" + std::to_string(t0));
        }
        return h;
    }

    std::vector<double> sorted(t.begin(), t.end());
    std::sort(sorted.begin(), sorted.end());
    double max_gap = 0.0;
    for (std::size_t i = 1; i < sorted.size(); ++i) max_gap = std::max(max_gap, sorted[i] - sorted[i - 1]);
    const double range = sorted.back() - sorted.front();
    if (!(range > 0.0)) throw ValidationError("cross-validation needs distinct sampling points");
    const double lo = std::min(max_gap * (degree + 1), range);
    const auto candidates = log_space(lo, range, 20);
    double mean_sq = 0.0;
    for (double v : y) mean_sq += v * v;
    mean_sq /= static_cast<double>(y.size());
    const double tie = 1e-10 * std::max(mean_sq, 1e-300);

    double best_h = 0.0;
    double best_err = std::numeric_limits<double>::infinity();
    for (double h : candidates) {
        double err = 0.0;
        bool ok = true;
        for (std::size_t m = 0; m < t.size() && ok; ++m) {
            try {
                const double r = y[m] - local_poly_estimate(t, y, t[m], degree, h, kernel, m);
                err += r * r;
            } catch (const RankDeficientError&) {
                ok = false;
            }
        }
        if (!ok) continue;
        err /= static_cast<double>(t.size());
        if (err <= best_err + tie) {
            best_err = std::min(err, best_err);
            best_h = h;
        }
    }
    if (best_h == 0.0) throw RankDeficientError(t0, 0.0, "every candidate bandwidth gives a singular fit");
    return best_h;
}

double resolve_bandwidth(const BandwidthSpec& spec, std::span<const double> t, std::span<const double> y,
                         int degree, Kernel kernel) {
    if (spec.method == BandwidthMethod::fixed) {
        if (!(spec.value > 0.0) || !std::isfinite(spec.value)) {
            throw ValidationError("fixed bandwidth must be finite and positive");
        }
        return spec.value;
    }
    double anchor = spec.anchor;
    if (std::isnan(anchor)) {
        const auto [mn, mx] = std::minmax_element(t.begin(), t.end());
        anchor = 0.5 * (*mn + *mx);
    }
    return estimate_bandwidth(t, y, anchor, spec.method, degree, kernel, spec.neighborhood);
}

namespace {

DenseFD smooth_tasks(const std::vector<std::vector<double>>& ts, const std::vector<std::vector<double>>& ys,
                     const std::string& dim_name, const Grid1D& out_grid, const SmoothSpec& spec) {
    std::vector<kernels::CurveTask> tasks(ts.size());
    for (std::size_t n = 0; n < ts.size(); ++n) {
        if (ts[n].size() < static_cast<std::size_t>(spec.degree) + 2) {
            throw ValidationError("observation " + std::to_string(n) + " has " + std::to_string(ts[n].size()) +
                                  " points; smoothing needs at least degree + 2");
        }
        tasks[n].t = ts[n];
        tasks[n].y = ys[n];
        tasks[n].bandwidth = resolve_bandwidth(spec.bandwidth, ts[n], ys[n], spec.degree, spec.kernel);
    }
    RowMatrix out;
    kernels::omp::local_poly_batch(tasks, out_grid.points(), spec.degree, spec.kernel, out);
    std::vector<double> values(out.data(), out.data() + out.size());
    return DenseFD(DenseArgvals{{dim_name, out_grid}}, std::move(values));
}

}  // namespace

DenseFD smooth_fd(const DenseFD& fd, const SmoothSpec& spec, const std::optional<Grid1D>& output) {
    if (fd.n_dim() != 1) throw ValidationError("smoothing is only defined for 1-D data");
    const Grid1D& grid = fd.grid(0);
    std::vector<std::vector<double>> ts(fd.n_obs()), ys(fd.n_obs());
    for (std::size_t n = 0; n < fd.n_obs(); ++n) {
        const auto row = fd.observation(n);
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (is_missing(row[i])) continue;
            ts[n].push_back(grid[i]);
            ys[n].push_back(row[i]);
        }
    }
    return smooth_tasks(ts, ys, fd.argvals()[0].name, output ? *output : grid, spec);
}

DenseFD smooth_fd(const IrregularFD& fd, const SmoothSpec& spec, const std::optional<Grid1D>& output) {
    if (fd.n_dim() != 1) throw ValidationError("smoothing is only defined for 1-D data");
    std::vector<std::vector<double>> ts(fd.n_obs()), ys(fd.n_obs());
    for (std::size_t n = 0; n < fd.n_obs(); ++n) {
        ts[n] = fd.obs(n).grids[0].vector();
        ys[n] = fd.obs(n).values;
    }
    return smooth_tasks(ts, ys, fd.dim_names()[0], output ? *output : fd.union_grid(0), spec);
}

DenseFD smooth_fd(const UnivariateFD& fd, const SmoothSpec& spec, const std::optional<Grid1D>& output) {
    return std::visit([&](const auto& x) { return smooth_fd(x, spec, output); }, fd);
}

}  // namespace fundata::smooth
