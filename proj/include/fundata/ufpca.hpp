#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "fundata/functional_data.hpp"
#include "fundata/moments.hpp"

namespace fundata::pca {

enum class ScoreMethod { numint, pace };

ScoreMethod parse_score_method(std::string_view name);
std::string to_string(ScoreMethod method);

/// Number of components: a proportion of explained variance when < 1,
/// otherwise an integer count.
std::size_t select_n_components(const Eigen::VectorXd& eigenvalues, double n_comp);

struct UfpcaOptions {
    moments::MeanOptions mean{};
    moments::CovarianceOptions covariance{};
};

struct UfpcaModel {
    std::string dim_name;
    Grid1D grid;
    Eigen::VectorXd mean;
    /// (J, M), orthonormal under the grid's trapezoid rule.
    RowMatrix eigenfunctions;
    Eigen::VectorXd eigenvalues;
    /// Full clipped spectrum, for diagnostics.
    Eigen::VectorXd spectrum;
    std::size_t n_clipped = 0;
    double n_comp = 0.0;
    double noise_variance = 0.0;

    std::size_t n_components() const { return static_cast<std::size_t>(eigenvalues.size()); }
};

UfpcaModel ufpca_fit(const UnivariateFD& fd, double n_comp, const UfpcaOptions& options = {});

/// (N, J) scores. NumInt: trapezoid inner products of the centered curves on
/// each observation's observed points. PACE: conditional expectation under the
/// fitted eigenstructure plus noise variance.
RowMatrix ufpca_scores(const UfpcaModel& model, const UnivariateFD& fd, ScoreMethod method = ScoreMethod::numint);

/// mean + scores * eigenfunctions on the model grid; scores may use the first w <= J columns.
DenseFD ufpca_inverse(const UfpcaModel& model, const RowMatrix& scores);

}  // namespace fundata::pca
