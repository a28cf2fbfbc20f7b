#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "fundata/fcptpa.hpp"
#include "fundata/functional_data.hpp"
#include "fundata/ufpca.hpp"

namespace fundata::pca {

using ComponentBasis = std::variant<UfpcaModel, FcptpaModel>;

struct MfpcaOptions {
    ScoreMethod method = ScoreMethod::numint;
    UfpcaOptions ufpca{};
    FcptpaOptions fcptpa{};
};

struct MfpcaModel {
    std::vector<ComponentBasis> bases;
    /// First column of each component's block in the stacked scores.
    std::vector<std::size_t> offsets;
    ScoreMethod method = ScoreMethod::numint;
    /// Stacked univariate training scores (N0, J+).
    RowMatrix stacked_scores;
    /// Eigenpairs of Z = stacked^T stacked / N0, eigenvalues non-increasing.
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
    std::size_t n_clipped = 0;
    /// Per component: (J+, cells) multivariate eigenfunctions.
    std::vector<RowMatrix> eigenfunctions;
    /// Multivariate training scores (N0, J+).
    RowMatrix scores;

    std::size_t n_components() const { return static_cast<std::size_t>(eigenvalues.size()); }
    std::size_t n_features() const { return static_cast<std::size_t>(stacked_scores.cols()); }
};

const Eigen::VectorXd& component_mean(const ComponentBasis& basis);
/// Orthonormal univariate basis of a component, (J_p, cells).
const RowMatrix& component_functions(const ComponentBasis& basis);
DenseArgvals component_argvals(const ComponentBasis& basis);

/// One n_comp entry per component (proportion < 1 or count).
MfpcaModel mfpca_fit(const MultivariateFD& fd, std::span<const double> n_comp, const MfpcaOptions& options = {});

/// Stacked univariate scores of new data, before projection.
RowMatrix mfpca_stacked_scores(const MfpcaModel& model, const MultivariateFD& fd);

RowMatrix mfpca_transform(const MfpcaModel& model, const MultivariateFD& fd);

/// Scores may use the first w <= J+ columns.
MultivariateFD mfpca_inverse_transform(const MfpcaModel& model, const RowMatrix& scores);

}  // namespace fundata::pca
