#include "fundata/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fundata/errors.hpp"
#include "fundata/rng.hpp"

namespace fundata::gmm {

namespace {

struct Component {
    Eigen::LLT<Eigen::MatrixXd> llt;
    double log_norm = 0.0;  // log of the Gaussian normalizing constant
};

std::vector<Component> factorize(const GmmModel& m) {
    std::vector<Component> out(m.n_components());
    const auto d = static_cast<double>(m.dim());
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k].llt.compute(m.covariances[k]);
        if (out[k].llt.info() != Eigen::Success) throw Error("mixture covariance is not positive definite");
        const Eigen::VectorXd diag = out[k].llt.matrixLLT().diagonal();
        double logdet = 0.0;
        for (Eigen::Index i = 0; i < diag.size(); ++i) logdet += 2.0 * std::log(diag(i));
        out[k].log_norm = -0.5 * (d * std::log(2.0 * std::numbers::pi) + logdet);
    }
    return out;
}

// log(pi_k N(x | m_k, S_k)) for every point and component; returns the log-likelihood.
double log_joint(const GmmModel& m, const RowMatrix& x, Eigen::MatrixXd& lj, RowMatrix* resp) {
    const auto comps = factorize(m);
    const auto n = x.rows();
    const auto kk = static_cast<Eigen::Index>(m.n_components());
    lj.resize(n, kk);
    for (Eigen::Index k = 0; k < kk; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        const double lw = std::log(m.weights[ku]);
        for (Eigen::Index i = 0; i < n; ++i) {
            const Eigen::VectorXd diff = x.row(i).transpose() - m.means[ku];
            const Eigen::VectorXd z = comps[ku].llt.matrixL().solve(diff);
            lj(i, k) = lw + comps[ku].log_norm - 0.5 * z.squaredNorm();
        }
    }
    double ll = 0.0;
    if (resp) resp->resize(n, kk);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double top = lj.row(i).maxCoeff();
        double s = 0.0;
        for (Eigen::Index k = 0; k < kk; ++k) s += std::exp(lj(i, k) - top);
        const double lse = top + std::log(s);
        ll += lse;
        if (resp) {
            for (Eigen::Index k = 0; k < kk; ++k) (*resp)(i, k) = std::exp(lj(i, k) - lse);
        }
    }
    return ll;
}

Eigen::MatrixXd floor_covariance(const Eigen::MatrixXd& s, double floor) {
    Eigen::MatrixXd sym = 0.5 * (s + s.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    if (eig.eigenvalues().minCoeff() >= floor) return sym;
    const Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(floor);
    return eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
}

Eigen::MatrixXd weighted_cov(const RowMatrix& x, const Eigen::VectorXd& r, const Eigen::VectorXd& mean, double nk) {
    const RowMatrix centered = x.rowwise() - mean.transpose();
    return (centered.transpose() * r.asDiagonal() * centered) / nk;
}

// M-step; components with negligible mass are re-seeded at the worst-fitting point.
void m_step(GmmModel& m, const RowMatrix& x, const RowMatrix& resp, const Eigen::MatrixXd& lj, double floor,
            const Eigen::MatrixXd& data_cov) {
    const auto n = static_cast<double>(x.rows());
    const auto kk = resp.cols();
    for (Eigen::Index k = 0; k < kk; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        const Eigen::VectorXd r = resp.col(k);
        const double nk = r.sum();
        if (nk < 1e-8) {
            Eigen::Index worst = 0;
            Eigen::VectorXd row_ll(lj.rows());
            for (Eigen::Index i = 0; i < lj.rows(); ++i) {
                const double top = lj.row(i).maxCoeff();
                row_ll(i) = top + std::log((lj.row(i).array() - top).exp().sum());
            }
            row_ll.minCoeff(&worst);
            m.means[ku] = x.row(worst).transpose();
            m.covariances[ku] = floor_covariance(data_cov, floor);
            m.weights[ku] = 1.0 / n;
            continue;
        }
        m.weights[ku] = nk / n;
        m.means[ku] = (x.transpose() * r) / nk;
        m.covariances[ku] = floor_covariance(weighted_cov(x, r, m.means[ku], nk), floor);
    }
    double total = 0.0;
    for (double w : m.weights) total += w;
    for (double& w : m.weights) w /= total;
}

std::vector<Eigen::Index> kmeanspp(const RowMatrix& x, std::size_t k, Rng& rng) {
    const auto n = static_cast<std::size_t>(x.rows());
    std::vector<Eigen::Index> centers{static_cast<Eigen::Index>(rng.below(n))};
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    while (centers.size() < k) {
        const auto& c = x.row(centers.back());
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], (x.row(static_cast<Eigen::Index>(i)) - c).squaredNorm());
            total += d2[i];
        }
        std::size_t pick = 0;
        if (total > 0.0) {
            const double u = rng.uniform() * total;
            double acc = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (u < acc) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<std::size_t>(rng.below(n));
        }
        centers.push_back(static_cast<Eigen::Index>(pick));
    }
    return centers;
}

GmmModel fit_once(const RowMatrix& x, std::size_t k, Rng& rng, const GmmOptions& options, double floor,
                  const Eigen::MatrixXd& data_cov) {
    const auto n = x.rows();
    const auto kk = static_cast<Eigen::Index>(k);
    GmmModel m;
    m.weights.assign(k, 1.0 / static_cast<double>(k));
    m.means.resize(k);
    m.covariances.resize(k);
    m.n_obs = static_cast<std::size_t>(n);

    // Hard assignment to the nearest k-means++ center gives the first responsibilities.
    const auto centers = kmeanspp(x, k, rng);
    RowMatrix resp = RowMatrix::Zero(n, kk);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (Eigen::Index c = 0; c < kk; ++c) {
            const double dist = (x.row(i) - x.row(centers[static_cast<std::size_t>(c)])).squaredNorm();
            if (dist < best_d) {
                best_d = dist;
                best = c;
            }
        }
        resp(i, best) = 1.0;
    }
    for (std::size_t c = 0; c < k; ++c) {
        m.means[c] = x.row(centers[c]).transpose();
        m.covariances[c] = floor_covariance(data_cov, floor);
    }
    Eigen::MatrixXd lj = Eigen::MatrixXd::Zero(n, kk);
    m_step(m, x, resp, lj, floor, data_cov);

    double previous = -std::numeric_limits<double>::infinity();
    for (std::size_t it = 0; it < options.max_iter; ++it) {
        const double ll = log_joint(m, x, lj, &resp);
        m.loglik_trace.push_back(ll);
        if (std::abs(ll - previous) <= options.tolerance) {
            m.converged = true;
            break;
        }
        previous = ll;
        m_step(m, x, resp, lj, floor, data_cov);
    }
    m.loglik = log_joint(m, x, lj, nullptr);
    m.n_params = n_parameters(k, static_cast<std::size_t>(x.cols()));
    m.bic = 2.0 * m.loglik - static_cast<double>(m.n_params) * std::log(static_cast<double>(n));
    const double min_mass = static_cast<double>(x.cols() + 1);
    for (double w : m.weights) m.degenerate = m.degenerate || w * static_cast<double>(n) < min_mass;
    return m;
}

}  // namespace

std::size_t n_parameters(std::size_t k, std::size_t d) { return k - 1 + k * d + k * d * (d + 1) / 2; }

GmmModel gmm_fit(const RowMatrix& points, std::size_t k, std::uint64_t seed, const GmmOptions& options) {
    const auto n = static_cast<std::size_t>(points.rows());
    if (k == 0) throw ValidationError("a mixture needs at least one component");
    if (points.cols() == 0) throw ValidationError("points need at least one coordinate");
    if (n < k) {
        throw ValidationError("cannot fit " + std::to_string(k) + " components to " + std::to_string(n) + " points");
    }
    if (!points.allFinite()) throw ValidationError("points must be finite");
    const Eigen::VectorXd mean = points.colwise().mean().transpose();
    const RowMatrix centered = points.rowwise() - mean.transpose();
    const Eigen::MatrixXd data_cov = centered.transpose() * centered / static_cast<double>(n);
    const double mean_var = data_cov.diagonal().mean();
    if (!(mean_var > 0.0) && k > 1) throw ValidationError("zero-variance data cannot support several components");
    const double floor = std::max(1e-6 * mean_var, 1e-12);

    Rng rng(seed, 100 + k);
    GmmModel best;
    bool have = false;
    const std::size_t starts = k == 1 ? 1 : std::max<std::size_t>(1, options.restarts);
    for (std::size_t s = 0; s < starts; ++s) {
        GmmModel m = fit_once(points, k, rng, options, floor, data_cov);
        const bool better = best.degenerate ? (!m.degenerate || m.loglik > best.loglik)
                                            : (!m.degenerate && m.loglik > best.loglik);
        if (!have || better) {
            best = std::move(m);
            have = true;
        }
    }
    return best;
}

Selection gmm_select_k(const RowMatrix& points, std::size_t k_max, std::uint64_t seed, const GmmOptions& options) {
    if (k_max == 0) throw ValidationError("k_max must be at least 1");
    const std::size_t cap = std::min<std::size_t>(k_max, static_cast<std::size_t>(points.rows()));
    Selection sel;
    for (std::size_t k = 1; k <= cap; ++k) {
        sel.models.push_back(gmm_fit(points, k, seed, options));
        const GmmModel& m = sel.models.back();
        if (!m.degenerate && m.bic > sel.models[sel.k_hat - 1].bic) sel.k_hat = k;
    }
    return sel;
}

RowMatrix gmm_posterior(const GmmModel& model, const RowMatrix& points) {
    if (static_cast<std::size_t>(points.cols()) != model.dim()) {
        throw ValidationError("points have " + std::to_string(points.cols()) + " coordinates, model expects " +
                              std::to_string(model.dim()));
    }
    Eigen::MatrixXd lj;
    RowMatrix resp;
    log_joint(model, points, lj, &resp);
    return resp;
}

double gmm_loglik(const GmmModel& model, const RowMatrix& points) {
    Eigen::MatrixXd lj;
    return log_joint(model, points, lj, nullptr);
}

std::vector<int> gmm_predict(const GmmModel& model, const RowMatrix& points) {
    const RowMatrix resp = gmm_posterior(model, points);
    std::vector<int> out(static_cast<std::size_t>(resp.rows()));
    for (Eigen::Index i = 0; i < resp.rows(); ++i) {
        Eigen::Index arg = 0;
        for (Eigen::Index k = 1; k < resp.cols(); ++k) {
            if (resp(i, k) > resp(i, arg)) arg = k;
        }
        out[static_cast<std::size_t>(i)] = static_cast<int>(arg);
    }
    return out;
}

}  // namespace fundata::gmm
