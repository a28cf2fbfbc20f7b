#include "fundata/fcptpa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fundata/basis.hpp"
#include "fundata/errors.hpp"

namespace fundata::pca {

namespace {

// Eigenpairs of D^T D for the second-difference operator on `size` points.
struct Penalty {
    Eigen::MatrixXd vectors;
    Eigen::VectorXd values;
    bool active = false;
};

Penalty make_penalty(std::size_t size, const std::pair<double, double>& range) {
    Penalty p;
    if (size < 3 || range.second <= 0.0) return p;
    const auto s = static_cast<Eigen::Index>(size);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(s - 2, s);
    for (Eigen::Index i = 0; i + 2 < s; ++i) {
        d(i, i) = 1.0;
        d(i, i + 1) = -2.0;
        d(i, i + 2) = 1.0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(d.transpose() * d);
    p.vectors = eig.eigenvectors();
    p.values = eig.eigenvalues().cwiseMax(0.0);
    p.active = true;
    return p;
}

std::vector<double> alpha_grid(const std::pair<double, double>& range, std::size_t count) {
    if (range.second <= 0.0) return {0.0};
    const double lo = range.first > 0.0 ? range.first : range.second * 1e-6;
    const double hi = range.second;
    if (count < 2 || lo >= hi) return {hi};
    std::vector<double> out(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double f = static_cast<double>(k) / static_cast<double>(count - 1);
        out[k] = std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo)));
    }
    return out;
}

// Smooths z by (I + alpha D^T D)^-1 with alpha chosen by GCV; returns alpha.
double penalized_update(Eigen::VectorXd& z, const Penalty& pen, const std::vector<double>& alphas) {
    if (!pen.active) return 0.0;
    const Eigen::VectorXd c = pen.vectors.transpose() * z;
    const auto s = static_cast<double>(z.size());
    double best_alpha = alphas.front();
    double best_gcv = std::numeric_limits<double>::infinity();
    for (double a : alphas) {
        double rss = 0.0, tr = 0.0;
        for (Eigen::Index k = 0; k < c.size(); ++k) {
            const double f = 1.0 / (1.0 + a * pen.values(k));
            rss += (1.0 - f) * (1.0 - f) * c(k) * c(k);
            tr += f;
        }
        const double denom = 1.0 - tr / s;
        if (denom <= 0.0) continue;
        const double gcv = (rss / s) / (denom * denom);
        if (gcv < best_gcv) {
            best_gcv = gcv;
            best_alpha = a;
        }
    }
    Eigen::VectorXd f(c.size());
    for (Eigen::Index k = 0; k < c.size(); ++k) f(k) = 1.0 / (1.0 + best_alpha * pen.values(k));
    z = pen.vectors * f.cwiseProduct(c);
    return best_alpha;
}

Eigen::VectorXd contract_u(const Tensor3& x, const Eigen::VectorXd& v, const Eigen::VectorXd& w) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(x.n));
    for (std::size_t i = 0; i < x.n; ++i) {
        double s = 0.0;
        for (std::size_t a = 0; a < x.sx; ++a) {
            double r = 0.0;
            for (std::size_t b = 0; b < x.sy; ++b) r += x(i, a, b) * w(static_cast<Eigen::Index>(b));
            s += v(static_cast<Eigen::Index>(a)) * r;
        }
        u(static_cast<Eigen::Index>(i)) = s;
    }
    return u;
}

Eigen::VectorXd contract_v(const Tensor3& x, const Eigen::VectorXd& u, const Eigen::VectorXd& w) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(x.sx));
    for (std::size_t i = 0; i < x.n; ++i) {
        const double ui = u(static_cast<Eigen::Index>(i));
        for (std::size_t a = 0; a < x.sx; ++a) {
            double r = 0.0;
            for (std::size_t b = 0; b < x.sy; ++b) r += x(i, a, b) * w(static_cast<Eigen::Index>(b));
            v(static_cast<Eigen::Index>(a)) += ui * r;
        }
    }
    return v;
}

Eigen::VectorXd contract_w(const Tensor3& x, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(x.sy));
    for (std::size_t i = 0; i < x.n; ++i) {
        const double ui = u(static_cast<Eigen::Index>(i));
        for (std::size_t a = 0; a < x.sx; ++a) {
            const double c = ui * v(static_cast<Eigen::Index>(a));
            for (std::size_t b = 0; b < x.sy; ++b) w(static_cast<Eigen::Index>(b)) += c * x(i, a, b);
        }
    }
    return w;
}

Eigen::VectorXd leading_mode_vector(const Tensor3& x, bool rows) {
    const std::size_t s = rows ? x.sx : x.sy;
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s));
    for (std::size_t i = 0; i < x.n; ++i) {
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> slice(
            x.data.data() + i * x.sx * x.sy, static_cast<Eigen::Index>(x.sx), static_cast<Eigen::Index>(x.sy));
        if (rows) g.noalias() += slice * slice.transpose();
        else g.noalias() += slice.transpose() * slice;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g);
    return eig.eigenvectors().col(static_cast<Eigen::Index>(s) - 1);
}

bool normalize(Eigen::VectorXd& z) {
    const double nrm = z.norm();
    if (!(nrm > 0.0)) return false;
    z /= nrm;
    return true;
}

double tensor_norm(const Tensor3& x) {
    double s = 0.0;
    for (double v : x.data) s += v * v;
    return std::sqrt(s);
}

}  // namespace

CpDecomposition fcptpa(const Tensor3& input, std::size_t n_components, const FcptpaOptions& options) {
    if (input.data.size() != input.n * input.sx * input.sy || input.data.empty()) {
        throw ValidationError("tensor data does not match its shape");
    }
    if (n_components == 0) throw ValidationError("FCP-TPA needs at least one component");
    const std::size_t limit = std::min({input.n, input.sx, input.sy});
    if (n_components > limit) {
        throw ValidationError("FCP-TPA rank " + std::to_string(n_components) + " exceeds the smallest dimension " +
                              std::to_string(limit));
    }
    Tensor3 x = input;
    const Penalty pen_v = make_penalty(x.sx, options.alpha_range_v);
    const Penalty pen_w = make_penalty(x.sy, options.alpha_range_w);
    const auto alphas_v = alpha_grid(options.alpha_range_v, options.n_alpha);
    const auto alphas_w = alpha_grid(options.alpha_range_w, options.n_alpha);
    const auto jn = static_cast<Eigen::Index>(n_components);

    const double total_sq = tensor_norm(x) * tensor_norm(x);
    double explained_sq = 0.0;
    std::size_t fitted = 0;
    CpDecomposition out;
    out.lambda = Eigen::VectorXd::Zero(jn);
    out.u = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(x.n), jn);
    out.v = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(x.sx), jn);
    out.w = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(x.sy), jn);

    for (Eigen::Index j = 0; j < jn; ++j) {
        Eigen::VectorXd v = leading_mode_vector(x, true);
        Eigen::VectorXd w = leading_mode_vector(x, false);
        Eigen::VectorXd u = contract_u(x, v, w);
        double alpha_v = 0.0, alpha_w = 0.0, lambda = 0.0;
        std::size_t iter = 0;
        const bool degenerate = !(tensor_norm(x) > 0.0) || !normalize(u);
        if (degenerate) {
            u = Eigen::VectorXd::Unit(static_cast<Eigen::Index>(x.n), 0);
        } else {
            double previous = std::numeric_limits<double>::quiet_NaN();
            bool converged = false;
            while (iter < options.max_iter) {
                ++iter;
                v = contract_v(x, u, w);
                alpha_v = penalized_update(v, pen_v, alphas_v);
                if (!normalize(v)) break;
                w = contract_w(x, u, v);
                alpha_w = penalized_update(w, pen_w, alphas_w);
                if (!normalize(w)) break;
                u = contract_u(x, v, w);
                lambda = u.norm();
                if (!normalize(u)) break;
                if (std::abs(lambda - previous) <= options.tolerance * std::abs(lambda)) {
                    converged = true;
                    break;
                }
                previous = lambda;
            }
            if (!converged && lambda > 0.0) {
                throw ConvergenceError("FCP-TPA component " + std::to_string(j + 1) + " did not converge in " +
                                       std::to_string(options.max_iter) + " iterations");
            }
        }
        // Sign convention: largest-magnitude entries of v and w positive.
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0.0) {
            v = -v;
            u = -u;
        }
        w.cwiseAbs().maxCoeff(&arg);
        if (w(arg) < 0.0) {
            w = -w;
            u = -u;
        }
        out.lambda(j) = lambda;
        out.u.col(j) = u;
        out.v.col(j) = v;
        out.w.col(j) = w;
        out.alpha_v.push_back(alpha_v);
        out.alpha_w.push_back(alpha_w);
        out.degenerate.push_back(degenerate || lambda == 0.0);
        out.iterations.push_back(iter);
        ++fitted;
        explained_sq += lambda * lambda;
        if (options.stop_share > 0.0 && explained_sq >= options.stop_share * total_sq) break;
        if (lambda != 0.0) {
            for (std::size_t i = 0; i < x.n; ++i) {
                const double c = lambda * u(static_cast<Eigen::Index>(i));
                for (std::size_t a = 0; a < x.sx; ++a) {
                    const double ca = c * v(static_cast<Eigen::Index>(a));
                    for (std::size_t b = 0; b < x.sy; ++b) x(i, a, b) -= ca * w(static_cast<Eigen::Index>(b));
                }
            }
        }
    }

    if (fitted < n_components) {
        const auto k = static_cast<Eigen::Index>(fitted);
        out.lambda.conservativeResize(k);
        out.u.conservativeResize(Eigen::NoChange, k);
        out.v.conservativeResize(Eigen::NoChange, k);
        out.w.conservativeResize(Eigen::NoChange, k);
    }
    const auto kept = static_cast<Eigen::Index>(fitted);
    std::vector<Eigen::Index> order(fitted);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return out.lambda(a) > out.lambda(b); });
    CpDecomposition sorted = out;
    for (Eigen::Index k = 0; k < kept; ++k) {
        const Eigen::Index src = order[static_cast<std::size_t>(k)];
        const auto s = static_cast<std::size_t>(src);
        sorted.lambda(k) = out.lambda(src);
        sorted.u.col(k) = out.u.col(src);
        sorted.v.col(k) = out.v.col(src);
        sorted.w.col(k) = out.w.col(src);
        sorted.alpha_v[static_cast<std::size_t>(k)] = out.alpha_v[s];
        sorted.alpha_w[static_cast<std::size_t>(k)] = out.alpha_w[s];
        sorted.degenerate[static_cast<std::size_t>(k)] = out.degenerate[s];
        sorted.iterations[static_cast<std::size_t>(k)] = out.iterations[s];
    }
    return sorted;
}

namespace {

void check_image_data(const DenseFD& fd) {
    if (fd.n_dim() != 2) throw ValidationError("FCP-TPA needs a 2-D domain");
    if (fd.has_missing()) throw ValidationError("FCP-TPA does not accept missing cells");
}

Tensor3 centered_tensor(const DenseFD& fd, const Eigen::VectorXd& mean) {
    Tensor3 x{fd.n_obs(), fd.grid(0).size(), fd.grid(1).size(), {}};
    x.data.assign(fd.values().begin(), fd.values().end());
    const std::size_t cells = fd.n_cells();
    for (std::size_t i = 0; i < x.n; ++i) {
        for (std::size_t c = 0; c < cells; ++c) x.data[i * cells + c] -= mean(static_cast<Eigen::Index>(c));
    }
    return x;
}

}  // namespace

FcptpaModel fcptpa_fit(const DenseFD& fd, double n_comp, const FcptpaOptions& options) {
    check_image_data(fd);
    if (fd.n_obs() < 2) throw ValidationError("FCP-TPA needs at least two observations");
    if (!(n_comp > 0.0)) throw ValidationError("n_comp must be positive");
    const Eigen::VectorXd mean = fd.matrix().colwise().mean().transpose();
    const Tensor3 x = centered_tensor(fd, mean);
    const std::size_t limit = std::min({x.n, x.sx, x.sy});
    FcptpaOptions opts = options;
    std::size_t fit_rank = limit;
    if (n_comp >= 1.0) {
        if (n_comp != std::floor(n_comp)) throw ValidationError("n_comp >= 1 must be an integer");
        fit_rank = static_cast<std::size_t>(n_comp);
        opts.stop_share = 0.0;
    } else {
        if (!(tensor_norm(x) > 0.0)) throw ValidationError("images have no variation to decompose");
        opts.stop_share = n_comp;
    }
    CpDecomposition dec = fcptpa(x, fit_rank, opts);
    const std::size_t keep = static_cast<std::size_t>(dec.lambda.size());

    const auto weights = sim::quadrature_weights({fd.grid(0), fd.grid(1)});
    const auto cells = static_cast<Eigen::Index>(fd.n_cells());
    const auto jn = static_cast<Eigen::Index>(keep);
    RowMatrix images(jn, cells);
    for (Eigen::Index j = 0; j < jn; ++j) {
        for (std::size_t a = 0; a < x.sx; ++a) {
            for (std::size_t b = 0; b < x.sy; ++b) {
                images(j, static_cast<Eigen::Index>(a * x.sy + b)) =
                    dec.v(static_cast<Eigen::Index>(a), j) * dec.w(static_cast<Eigen::Index>(b), j);
            }
        }
        double nrm = 0.0;
        for (Eigen::Index c = 0; c < cells; ++c) nrm += weights[static_cast<std::size_t>(c)] * images(j, c) * images(j, c);
        if (nrm > 0.0) images.row(j) /= std::sqrt(nrm);
    }
    RowMatrix training = dec.u * dec.lambda.asDiagonal();
    return FcptpaModel{fd.argvals(), mean, std::move(dec), std::move(images), std::move(training), n_comp};
}

RowMatrix fcptpa_scores(const FcptpaModel& model, const DenseFD& fd) {
    check_image_data(fd);
    if (!(fd.argvals()[0].grid == model.argvals[0].grid) || !(fd.argvals()[1].grid == model.argvals[1].grid)) {
        throw ValidationError("image grids do not match the model grids");
    }
    const auto weights = sim::quadrature_weights({fd.grid(0), fd.grid(1)});
    const Eigen::Map<const Eigen::VectorXd> w(weights.data(), static_cast<Eigen::Index>(weights.size()));
    const Eigen::MatrixXd ew = model.eigenimages * w.asDiagonal();
    const Eigen::MatrixXd gram = ew * model.eigenimages.transpose();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (ldlt.info() != Eigen::Success) throw ValidationError("eigenimages are linearly dependent");
    RowMatrix centered = fd.matrix();
    centered.rowwise() -= model.mean.transpose();
    const Eigen::MatrixXd rhs = ew * centered.transpose();
    return ldlt.solve(rhs).transpose();
}

DenseFD fcptpa_inverse(const FcptpaModel& model, const RowMatrix& scores) {
    if (scores.cols() > static_cast<Eigen::Index>(model.n_components())) {
        throw ValidationError("score width exceeds the number of eigenimages");
    }
    RowMatrix x = scores * model.eigenimages.topRows(scores.cols());
    x.rowwise() += model.mean.transpose();
    return DenseFD(model.argvals, std::vector<double>(x.data(), x.data() + x.size()));
}

}  // namespace fundata::pca
