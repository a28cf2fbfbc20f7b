#include "fundata/ufpca.hpp"

#include <cmath>
#include <vector>

#include "fundata/errors.hpp"
#include "fundata/parallel.hpp"

namespace fundata::pca {

ScoreMethod parse_score_method(std::string_view name) {
    if (name == "numint" || name == "NumInt") return ScoreMethod::numint;
    if (name == "pace" || name == "PACE") return ScoreMethod::pace;
    throw ValidationError("unknown score method '" + std::string(name) + "'");
}

std::string to_string(ScoreMethod method) { return method == ScoreMethod::numint ? "numint" : "pace"; }

std::size_t select_n_components(const Eigen::VectorXd& eigenvalues, double n_comp) {
    if (!(n_comp > 0.0) || !std::isfinite(n_comp)) throw ValidationError("n_comp must be positive");
    const double top = eigenvalues.size() > 0 ? eigenvalues(0) : 0.0;
    std::size_t positive = 0;
    for (Eigen::Index j = 0; j < eigenvalues.size(); ++j) {
        if (eigenvalues(j) > 1e-12 * top && eigenvalues(j) > 0.0) ++positive;
    }
    if (n_comp >= 1.0) {
        if (n_comp != std::floor(n_comp)) throw ValidationError("n_comp >= 1 must be an integer");
        const auto count = static_cast<std::size_t>(n_comp);
        if (count > positive) {
            throw ValidationError("n_comp=" + std::to_string(count) + " exceeds the " + std::to_string(positive) +
                                  " positive eigenvalues");
        }
        return count;
    }
    if (positive == 0) throw ValidationError("no positive eigenvalue to retain");
    double total = 0.0;
    for (std::size_t j = 0; j < positive; ++j) total += eigenvalues(static_cast<Eigen::Index>(j));
    double acc = 0.0;
    for (std::size_t j = 0; j < positive; ++j) {
        acc += eigenvalues(static_cast<Eigen::Index>(j));
        if (acc / total >= n_comp) return j + 1;
    }
    return positive;
}

UfpcaModel ufpca_fit(const UnivariateFD& fd, double n_comp, const UfpcaOptions& options) {
    if (n_dim(fd) != 1) throw ValidationError("univariate FPCA needs a 1-D domain");
    if (n_obs(fd) < 2) throw ValidationError("univariate FPCA needs at least two observations");
    const DenseFD mean = moments::estimate_mean(fd, options.mean);
    const auto cov = moments::estimate_covariance(fd, options.covariance);
    const auto spectrum = moments::covariance_spectrum(cov);
    const std::size_t j = select_n_components(spectrum.values, n_comp);
    UfpcaModel model{mean.argvals()[0].name,
                     cov.grid_s,
                     Eigen::Map<const Eigen::VectorXd>(mean.values().data(), static_cast<Eigen::Index>(mean.n_cells())),
                     spectrum.functions.topRows(static_cast<Eigen::Index>(j)),
                     spectrum.values.head(static_cast<Eigen::Index>(j)),
                     spectrum.values,
                     spectrum.n_clipped,
                     n_comp,
                     cov.noise_variance.value_or(0.0)};
    if (!(mean.grid(0) == cov.grid_s)) throw Error("mean and covariance grids differ");
    return model;
}

namespace {

// Model quantities at arbitrary points of the model's range.
struct LocalBasis {
    Eigen::VectorXd mean;
    Eigen::MatrixXd phi;  // (m, J)
};

LocalBasis local_basis(const UfpcaModel& model, std::span<const double> t) {
    const auto m = static_cast<Eigen::Index>(t.size());
    const auto jn = static_cast<Eigen::Index>(model.n_components());
    LocalBasis b{Eigen::VectorXd(m), Eigen::MatrixXd(m, jn)};
    const std::span<const double> mean(model.mean.data(), static_cast<std::size_t>(model.mean.size()));
    for (Eigen::Index i = 0; i < m; ++i) {
        const double ti = t[static_cast<std::size_t>(i)];
        const std::size_t exact = model.grid.find(ti);
        for (Eigen::Index j = -1; j < jn; ++j) {
            double v = 0.0;
            if (j < 0) {
                v = exact < model.grid.size() ? mean[exact] : interpolate(model.grid, mean, ti);
                b.mean(i) = v;
            } else {
                const auto row = model.eigenfunctions.row(j);
                const std::span<const double> f(row.data(), static_cast<std::size_t>(row.size()));
                v = exact < model.grid.size() ? f[exact] : interpolate(model.grid, f, ti);
                b.phi(i, j) = v;
            }
        }
    }
    return b;
}

Eigen::VectorXd pace_scores(const UfpcaModel& model, const LocalBasis& b, const Eigen::VectorXd& y,
                            std::size_t n) {
    const Eigen::MatrixXd lam = model.eigenvalues.asDiagonal();
    Eigen::MatrixXd sigma = b.phi * lam * b.phi.transpose();
    sigma.diagonal().array() += model.noise_variance;
    const double ridge = 1e-10 * std::max(sigma.trace(), 1e-300);
    sigma.diagonal().array() += ridge;
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) {
        throw ValidationError("PACE covariance of observation " + std::to_string(n) + " is singular");
    }
    return lam * b.phi.transpose() * llt.solve(y - b.mean);
}

}  // namespace

RowMatrix ufpca_scores(const UfpcaModel& model, const UnivariateFD& fd, ScoreMethod method) {
    if (n_dim(fd) != 1) throw ValidationError("univariate scores need 1-D data");
    const auto jn = static_cast<Eigen::Index>(model.n_components());
    const auto* dense = std::get_if<DenseFD>(&fd);
    if (dense && !(dense->grid(0) == model.grid)) {
        throw ValidationError("data grid does not match the model grid");
    }
    if (dense && method == ScoreMethod::numint) {
        RowMatrix x = dense->matrix();
        RowMatrix out;
        kernels::omp::trapezoid_scores(x, model.mean, model.eigenfunctions, model.grid, out);
        return out;
    }

    const std::size_t n_total = n_obs(fd);
    RowMatrix out(static_cast<Eigen::Index>(n_total), jn);
    for (std::size_t n = 0; n < n_total; ++n) {
        std::vector<double> t, y;
        if (dense) {
            const auto row = dense->observation(n);
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (is_missing(row[i])) continue;
                t.push_back(model.grid[i]);
                y.push_back(row[i]);
            }
        } else {
            const auto& o = std::get<IrregularFD>(fd).obs(n);
            t = o.grids[0].vector();
            y = o.values;
        }
        const LocalBasis b = local_basis(model, t);
        const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
        if (method == ScoreMethod::pace) {
            out.row(static_cast<Eigen::Index>(n)) = pace_scores(model, b, yv, n).transpose();
            continue;
        }
        if (t.size() < 2) {
            throw ValidationError("observation " + std::to_string(n) +
                                  " has fewer than two points for numerical integration");
        }
        const auto w = trapezoid_weights(t);
        const Eigen::Map<const Eigen::VectorXd> wv(w.data(), static_cast<Eigen::Index>(w.size()));
        const Eigen::VectorXd centered = (yv - b.mean).cwiseProduct(wv);
        out.row(static_cast<Eigen::Index>(n)) = (b.phi.transpose() * centered).transpose();
    }
    return out;
}

DenseFD ufpca_inverse(const UfpcaModel& model, const RowMatrix& scores) {
    const auto w = scores.cols();
    if (w > static_cast<Eigen::Index>(model.n_components())) {
        throw ValidationError("score width " + std::to_string(w) + " exceeds the " +
                              std::to_string(model.n_components()) + " model components");
    }
    RowMatrix x = scores * model.eigenfunctions.topRows(w);
    x.rowwise() += model.mean.transpose();
    return DenseFD(DenseArgvals{{model.dim_name, model.grid}}, std::vector<double>(x.data(), x.data() + x.size()));
}

}  // namespace fundata::pca
