#include "fundata/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fundata/errors.hpp"

namespace fundata::sim {

BasisName parse_basis_name(std::string_view name) {
    if (name == "legendre") return BasisName::legendre;
    if (name == "wiener") return BasisName::wiener;
    if (name == "fourier") return BasisName::fourier;
    if (name == "bsplines") return BasisName::bsplines;
    throw ValidationError("unknown basis '" + std::string(name) + "'");
}

std::string to_string(BasisName name) {
    switch (name) {
        case BasisName::legendre: return "legendre";
        case BasisName::wiener: return "wiener";
        case BasisName::fourier: return "fourier";
        case BasisName::bsplines: return "bsplines";
    }
    return "unknown";
}

std::vector<double> quadrature_weights(const std::vector<Grid1D>& grids) {
    std::vector<double> w = trapezoid_weights(grids.at(0).points());
    if (grids.size() == 1) return w;
    const std::vector<double> wy = trapezoid_weights(grids.at(1).points());
    std::vector<double> out(w.size() * wy.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        for (std::size_t j = 0; j < wy.size(); ++j) out[i * wy.size() + j] = w[i] * wy[j];
    }
    return out;
}

Eigen::MatrixXd gram_matrix(const RowMatrix& functions, const std::vector<double>& weights) {
    const Eigen::Map<const Eigen::VectorXd> w(weights.data(), static_cast<Eigen::Index>(weights.size()));
    return functions * w.asDiagonal() * functions.transpose();
}

void orthonormalize_rows(RowMatrix& f, const std::vector<double>& weights) {
    const Eigen::Map<const Eigen::RowVectorXd> w(weights.data(), static_cast<Eigen::Index>(weights.size()));
    auto dot = [&](Eigen::Index a, Eigen::Index b) {
        return (f.row(a).array() * f.row(b).array() * w.array()).sum();
    };
    for (Eigen::Index j = 0; j < f.rows(); ++j) {
        const double start = std::sqrt(std::max(dot(j, j), 0.0));
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index k = 0; k < j; ++k) f.row(j) -= dot(j, k) * f.row(k);
        }
        const double norm = std::sqrt(std::max(dot(j, j), 0.0));
        if (!(norm > 1e-10 * std::max(start, 1e-300))) {
            throw ValidationError("basis function " + std::to_string(j) +
                                  " is linearly dependent on the previous ones on this grid");
        }
        f.row(j) /= norm;
    }
}

namespace {

// Cox-de Boor evaluation of all B-splines of `degree` on clamped `knots`.
std::vector<double> bspline_row(const std::vector<double>& knots, std::size_t degree, std::size_t count,
                                double t) {
    const std::size_t n_int = knots.size() - 1;
    std::vector<double> b(n_int, 0.0);
    const double last = knots.back();
    for (std::size_t i = 0; i < n_int; ++i) {
        if (knots[i] < knots[i + 1] &&
            ((t >= knots[i] && t < knots[i + 1]) || (t == last && knots[i + 1] == last))) {
            b[i] = 1.0;
            if (t == last) break;
        }
    }
    for (std::size_t p = 1; p <= degree; ++p) {
        for (std::size_t i = 0; i + p < n_int; ++i) {
            double v = 0.0;
            const double d1 = knots[i + p] - knots[i];
            const double d2 = knots[i + p + 1] - knots[i + 1];
            if (d1 > 0.0) v += (t - knots[i]) / d1 * b[i];
            if (d2 > 0.0) v += (knots[i + p + 1] - t) / d2 * b[i + 1];
            b[i] = v;
        }
    }
    b.resize(count);
    return b;
}

}  // namespace

Basis make_basis(BasisName name, std::size_t n_functions, const Grid1D& grid, bool orthonormalize) {
    if (n_functions == 0) throw ValidationError("a basis needs at least one function");
    const std::size_t m = grid.size();
    if (n_functions > m) {
        throw ValidationError("cannot represent " + std::to_string(n_functions) +
                              " independent functions on " + std::to_string(m) + " grid points");
    }
    Basis basis{to_string(name), {grid}, RowMatrix::Zero(static_cast<Eigen::Index>(n_functions),
                                                         static_cast<Eigen::Index>(m))};
    const auto w = quadrature_weights(basis.grids);
    if (m == 1) {
        basis.functions(0, 0) = 1.0;
        return basis;
    }
    const double a = grid.front();
    const double len = grid.length();
    const double pi = std::numbers::pi;
    bool needs_orthonormalization = orthonormalize;
    switch (name) {
        case BasisName::legendre: {
            for (std::size_t i = 0; i < m; ++i) {
                const double x = 2.0 * (grid[i] - a) / len - 1.0;
                double p0 = 1.0, p1 = x;
                for (std::size_t j = 0; j < n_functions; ++j) {
                    double pj;
                    if (j == 0) {
                        pj = p0;
                    } else if (j == 1) {
                        pj = p1;
                    } else {
                        const double jd = static_cast<double>(j);
                        pj = ((2.0 * jd - 1.0) * x * p1 - (jd - 1.0) * p0) / jd;
                        p0 = p1;
                        p1 = pj;
                    }
                    basis.functions(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
                        std::sqrt((2.0 * static_cast<double>(j) + 1.0) / len) * pj;
                }
            }
            needs_orthonormalization = true;
            break;
        }
        case BasisName::wiener: {
            for (std::size_t j = 0; j < n_functions; ++j) {
                const double freq = (static_cast<double>(j) + 0.5) * pi;
                for (std::size_t i = 0; i < m; ++i) {
                    basis.functions(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
                        std::sqrt(2.0 / len) * std::sin(freq * (grid[i] - a) / len);
                }
            }
            break;
        }
        case BasisName::fourier: {
            for (std::size_t j = 0; j < n_functions; ++j) {
                const std::size_t k = (j + 1) / 2;
                for (std::size_t i = 0; i < m; ++i) {
                    const double u = (grid[i] - a) / len;
                    double v;
                    if (j == 0) {
                        v = 1.0 / std::sqrt(len);
                    } else if (j % 2 == 1) {
                        v = std::sqrt(2.0 / len) * std::sin(2.0 * pi * static_cast<double>(k) * u);
                    } else {
                        v = std::sqrt(2.0 / len) * std::cos(2.0 * pi * static_cast<double>(k) * u);
                    }
                    basis.functions(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
                }
            }
            break;
        }
        case BasisName::bsplines: {
            const std::size_t degree = std::min<std::size_t>(3, n_functions - 1);
            const std::size_t interior = n_functions - degree - 1;
            std::vector<double> knots(degree + 1, a);
            for (std::size_t k = 1; k <= interior; ++k) {
                knots.push_back(a + len * static_cast<double>(k) / static_cast<double>(interior + 1));
            }
            knots.insert(knots.end(), degree + 1, grid.back());
            for (std::size_t i = 0; i < m; ++i) {
                const auto row = bspline_row(knots, degree, n_functions, grid[i]);
                for (std::size_t j = 0; j < n_functions; ++j) {
                    basis.functions(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = row[j];
                }
            }
            needs_orthonormalization = true;
            break;
        }
    }
    if (needs_orthonormalization) orthonormalize_rows(basis.functions, w);
    return basis;
}

Basis tensor_basis_2d(const Basis& bx, const Basis& by) {
    if (bx.n_dim() != 1 || by.n_dim() != 1) {
        throw ValidationError("tensor products need two 1-D bases");
    }
    const Eigen::Index jx = bx.functions.rows();
    const Eigen::Index jy = by.functions.rows();
    const Eigen::Index mx = bx.functions.cols();
    const Eigen::Index my = by.functions.cols();
    Basis out{bx.name + "*" + by.name, {bx.grids[0], by.grids[0]}, RowMatrix(jx * jy, mx * my)};
    for (Eigen::Index i = 0; i < jx; ++i) {
        for (Eigen::Index j = 0; j < jy; ++j) {
            for (Eigen::Index s = 0; s < mx; ++s) {
                for (Eigen::Index t = 0; t < my; ++t) {
                    out.functions(i * jy + j, s * my + t) = bx.functions(i, s) * by.functions(j, t);
                }
            }
        }
    }
    return out;
}

DecayKind parse_decay_kind(std::string_view name) {
    if (name == "linear") return DecayKind::linear;
    if (name == "exponential") return DecayKind::exponential;
    if (name == "wiener") return DecayKind::wiener;
    throw ValidationError("unknown decay '" + std::string(name) + "'");
}

EigenDecay decay_values(DecayKind kind, std::size_t n_functions) {
    if (n_functions == 0) throw ValidationError("decay needs at least one value");
    EigenDecay d{kind, std::vector<double>(n_functions)};
    const double jn = static_cast<double>(n_functions);
    for (std::size_t i = 0; i < n_functions; ++i) {
        const double j = static_cast<double>(i + 1);
        switch (kind) {
            case DecayKind::linear: d.values[i] = (jn - j + 1.0) / jn; break;
            case DecayKind::exponential: d.values[i] = std::exp(-(j + 1.0) / 2.0); break;
            case DecayKind::wiener: {
                const double f = (j - 0.5) * std::numbers::pi;
                d.values[i] = 1.0 / (f * f);
                break;
            }
            case DecayKind::user:
                throw ValidationError("user decays are built with user_decay()");
        }
    }
    return d;
}

EigenDecay user_decay(std::vector<double> values) {
    if (values.empty()) throw ValidationError("decay needs at least one value");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] >= 0.0) || !std::isfinite(values[i])) {
            throw ValidationError("decay values must be finite and non-negative");
        }
        if (i > 0 && values[i] > values[i - 1]) {
            throw ValidationError("decay values must be non-increasing");
        }
    }
    return {DecayKind::user, std::move(values)};
}

}  // namespace fundata::sim
