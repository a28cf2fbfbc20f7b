#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "fundata/functional_data.hpp"
#include "fundata/grid.hpp"

namespace fundata::sim {

enum class BasisName { legendre, wiener, fourier, bsplines };

BasisName parse_basis_name(std::string_view name);
std::string to_string(BasisName name);

/// Basis functions evaluated on a 1-D grid or a 2-D tensor grid.
/// `functions` has one row per function and one column per cell (row-major
/// over the grids for 2-D).
struct Basis {
    std::string name;
    std::vector<Grid1D> grids;
    RowMatrix functions;

    std::size_t n_functions() const { return static_cast<std::size_t>(functions.rows()); }
    std::size_t n_dim() const { return grids.size(); }
    std::size_t n_cells() const { return static_cast<std::size_t>(functions.cols()); }
};

/// Evaluates J functions of the named family on `grid`.
///
/// Wiener and Fourier functions are the analytic orthonormal families on
/// [grid.front(), grid.back()]. Legendre polynomials and B-splines are
/// orthonormalized by Gram-Schmidt under the grid's trapezoid inner product;
/// `orthonormalize` forces the same step for the analytic families.
Basis make_basis(BasisName name, std::size_t n_functions, const Grid1D& grid,
                 bool orthonormalize = false);

/// phi_ij(s, t) = phi_i(s) psi_j(t), function index i * J_y + j.
Basis tensor_basis_2d(const Basis& basis_x, const Basis& basis_y);

/// Trapezoid weights of the basis grid (outer product for 2-D).
std::vector<double> quadrature_weights(const std::vector<Grid1D>& grids);

/// Gram matrix of the rows of `functions` under quadrature `weights`.
Eigen::MatrixXd gram_matrix(const RowMatrix& functions, const std::vector<double>& weights);

/// Modified Gram-Schmidt (two passes) of the rows under `weights`; throws when
/// a row is numerically dependent on the previous ones.
void orthonormalize_rows(RowMatrix& functions, const std::vector<double>& weights);

enum class DecayKind { linear, exponential, wiener, user };

DecayKind parse_decay_kind(std::string_view name);

/// Non-increasing, non-negative score variances.
struct EigenDecay {
    DecayKind kind = DecayKind::user;
    std::vector<double> values;
};

/// linear (J-j+1)/J, exponential exp(-(j+1)/2), wiener 1/((j-1/2) pi)^2 for j = 1..J.
EigenDecay decay_values(DecayKind kind, std::size_t n_functions);

/// Validates a user-supplied decay.
EigenDecay user_decay(std::vector<double> values);

}  // namespace fundata::sim
