#include "fundata/mfpca.hpp"

#include <string>

#include "fundata/errors.hpp"
#include "fundata/moments.hpp"

namespace fundata::pca {

const Eigen::VectorXd& component_mean(const ComponentBasis& basis) {
    return std::visit([](const auto& m) -> const Eigen::VectorXd& { return m.mean; }, basis);
}

const RowMatrix& component_functions(const ComponentBasis& basis) {
    if (const auto* u = std::get_if<UfpcaModel>(&basis)) return u->eigenfunctions;
    return std::get<FcptpaModel>(basis).eigenimages;
}

DenseArgvals component_argvals(const ComponentBasis& basis) {
    if (const auto* u = std::get_if<UfpcaModel>(&basis)) return {{u->dim_name, u->grid}};
    return std::get<FcptpaModel>(basis).argvals;
}

namespace {

RowMatrix component_scores(const ComponentBasis& basis, const UnivariateFD& fd, ScoreMethod method) {
    if (const auto* u = std::get_if<UfpcaModel>(&basis)) return ufpca_scores(*u, fd, method);
    const auto* dense = std::get_if<DenseFD>(&fd);
    if (!dense) throw ValidationError("2-D components must be dense");
    return fcptpa_scores(std::get<FcptpaModel>(basis), *dense);
}

}  // namespace

MfpcaModel mfpca_fit(const MultivariateFD& fd, std::span<const double> n_comp, const MfpcaOptions& options) {
    const std::size_t p_count = fd.n_components();
    if (n_comp.size() != p_count) {
        throw ValidationError("n_comp has " + std::to_string(n_comp.size()) + " entries for " +
                              std::to_string(p_count) + " components");
    }
    const std::size_t n0 = fd.n_obs();
    if (n0 < 2) throw ValidationError("MFPCA needs at least two observations");

    MfpcaModel model;
    model.method = options.method;
    std::vector<RowMatrix> blocks;
    std::size_t total = 0;
    for (std::size_t p = 0; p < p_count; ++p) {
        const auto& comp = fd[p];
        const std::size_t d = n_dim(comp);
        if (d == 1) {
            model.bases.emplace_back(ufpca_fit(comp, n_comp[p], options.ufpca));
        } else if (d == 2) {
            const auto* dense = std::get_if<DenseFD>(&comp);
            if (!dense) throw ValidationError("component " + std::to_string(p) + ": 2-D components must be dense");
            model.bases.emplace_back(fcptpa_fit(*dense, n_comp[p], options.fcptpa));
        } else {
            throw ValidationError("component " + std::to_string(p) + " has an unsupported " + std::to_string(d) +
                                  "-D domain");
        }
        blocks.push_back(component_scores(model.bases.back(), comp, options.method));
        model.offsets.push_back(total);
        total += static_cast<std::size_t>(blocks.back().cols());
    }
    if (total == 0) throw ValidationError("no univariate component was retained");

    model.stacked_scores.resize(static_cast<Eigen::Index>(n0), static_cast<Eigen::Index>(total));
    for (std::size_t p = 0; p < p_count; ++p) {
        model.stacked_scores.middleCols(static_cast<Eigen::Index>(model.offsets[p]), blocks[p].cols()) = blocks[p];
    }

    const auto jp = static_cast<Eigen::Index>(total);
    Eigen::MatrixXd z = model.stacked_scores.transpose() * model.stacked_scores / static_cast<double>(n0);
    z = 0.5 * (z + z.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(z);
    if (eig.info() != Eigen::Success) throw Error("score covariance eigendecomposition failed");
    model.eigenvalues.resize(jp);
    model.eigenvectors.resize(jp, jp);
    for (Eigen::Index k = 0; k < jp; ++k) {
        const Eigen::Index src = jp - 1 - k;
        double lambda = eig.eigenvalues()(src);
        if (lambda < 0.0) {
            lambda = 0.0;
            ++model.n_clipped;
        }
        model.eigenvalues(k) = lambda;
        model.eigenvectors.col(k) = eig.eigenvectors().col(src);
    }

    for (std::size_t p = 0; p < p_count; ++p) {
        const RowMatrix& rho = component_functions(model.bases[p]);
        const auto off = static_cast<Eigen::Index>(model.offsets[p]);
        model.eigenfunctions.push_back(model.eigenvectors.middleRows(off, rho.rows()).transpose() * rho);
    }
    // Sign convention: the largest-magnitude entry over all components is positive.
    for (Eigen::Index k = 0; k < jp; ++k) {
        double best = 0.0;
        for (const auto& f : model.eigenfunctions) {
            for (Eigen::Index c = 0; c < f.cols(); ++c) {
                if (std::abs(f(k, c)) > std::abs(best)) best = f(k, c);
            }
        }
        if (best < 0.0) {
            model.eigenvectors.col(k) *= -1.0;
            for (auto& f : model.eigenfunctions) f.row(k) *= -1.0;
        }
    }
    model.scores = model.stacked_scores * model.eigenvectors;
    return model;
}

RowMatrix mfpca_stacked_scores(const MfpcaModel& model, const MultivariateFD& fd) {
    if (fd.n_components() != model.bases.size()) {
        throw ValidationError("data has " + std::to_string(fd.n_components()) + " components, model has " +
                              std::to_string(model.bases.size()));
    }
    RowMatrix stacked(static_cast<Eigen::Index>(fd.n_obs()), static_cast<Eigen::Index>(model.n_features()));
    for (std::size_t p = 0; p < model.bases.size(); ++p) {
        const RowMatrix block = component_scores(model.bases[p], fd[p], model.method);
        stacked.middleCols(static_cast<Eigen::Index>(model.offsets[p]), block.cols()) = block;
    }
    return stacked;
}

RowMatrix mfpca_transform(const MfpcaModel& model, const MultivariateFD& fd) {
    return mfpca_stacked_scores(model, fd) * model.eigenvectors;
}

MultivariateFD mfpca_inverse_transform(const MfpcaModel& model, const RowMatrix& scores) {
    const auto w = scores.cols();
    if (w > static_cast<Eigen::Index>(model.n_components())) {
        throw ValidationError("score width " + std::to_string(w) + " exceeds " +
                              std::to_string(model.n_components()) + " components");
    }
    std::vector<UnivariateFD> comps;
    for (std::size_t p = 0; p < model.bases.size(); ++p) {
        RowMatrix x = scores * model.eigenfunctions[p].topRows(w);
        x.rowwise() += component_mean(model.bases[p]).transpose();
        comps.emplace_back(DenseFD(component_argvals(model.bases[p]), std::vector<double>(x.data(), x.data() + x.size())));
    }
    return MultivariateFD(std::move(comps));
}

}  // namespace fundata::pca
