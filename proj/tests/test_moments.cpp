#include <doctest.h>

#include <cmath>

#include "fundata/basis.hpp"
#include "fundata/errors.hpp"
#include "fundata/moments.hpp"
#include "fundata/simulation.hpp"
#include "test_util.hpp"

using namespace fundata;
using namespace fundata::moments;

namespace {

DenseFD affine(const DenseFD& d, double scale, double shift) {
    RowMatrix x = d.matrix();
    x = (x.array() * scale + shift).matrix();
    return DenseFD(d.grid(), x);
}

}  // namespace

TEST_CASE("mean and raw covariance match direct sums") {
    const DenseFD d = test::random_dense(30, 12, 21);
    const RowMatrix x = d.matrix();
    const DenseFD mean = estimate_mean(d);
    for (Eigen::Index i = 0; i < 12; ++i) {
        double s = 0.0;
        for (Eigen::Index n = 0; n < 30; ++n) s += x(n, i);
        CHECK(mean.at(0, static_cast<std::size_t>(i)) == doctest::Approx(s / 30.0).epsilon(1e-13));
    }
    CovarianceOptions raw;
    raw.smooth_diagonal = false;
    const CovSurface c = estimate_covariance(d, raw);
    for (Eigen::Index i = 0; i < 12; i += 3) {
        for (Eigen::Index j = 0; j < 12; j += 2) {
            double mi = 0.0, mj = 0.0, sij = 0.0;
            for (Eigen::Index n = 0; n < 30; ++n) {
                mi += x(n, i) / 30.0;
                mj += x(n, j) / 30.0;
            }
            for (Eigen::Index n = 0; n < 30; ++n) sij += (x(n, i) - mi) * (x(n, j) - mj);
            CHECK(c.values(i, j) == doctest::Approx(sij / 30.0).epsilon(1e-12));
        }
    }
    CHECK((c.counts.array() == 30.0).all());
    CHECK_FALSE(c.diagonal_corrected);
}

TEST_CASE("missing cells use per-pair counts") {
    RowMatrix x(3, 3);
    x << 1, 2, kMissing,
         3, kMissing, 5,
         5, 6, 7;
    const DenseFD d(Grid1D::linspace(0, 1, 3), x);
    CHECK(estimate_mean(d).at(0, 1) == 4.0);
    const CovSurface c = cross_covariance(d, d);
    CHECK(c.counts(0, 1) == 2.0);
    CHECK(c.counts(1, 2) == 1.0);
    // cells 0 and 2 share observations 1 and 2; means 3 and 6
    CHECK(c.values(0, 2) == doctest::Approx(((3 - 3.0) * (5 - 6.0) + (5 - 3.0) * (7 - 6.0)) / 2.0));
    RowMatrix y(2, 2);
    y << 1, kMissing, kMissing, 2;
    CovarianceOptions raw;
    raw.smooth_diagonal = false;
    CHECK_THROWS_AS(estimate_covariance(DenseFD(Grid1D::linspace(0, 1, 2), y), raw), ValidationError);
}

TEST_CASE("shift and scale equivariance") {
    const DenseFD d = test::random_dense(40, 15, 22);
    const DenseFD a = affine(d, -2.5, 7.0);
    const DenseFD m0 = estimate_mean(d), m1 = estimate_mean(a);
    for (std::size_t i = 0; i < 15; ++i) CHECK(m1.at(0, i) == doctest::Approx(-2.5 * m0.at(0, i) + 7.0).epsilon(1e-12));
    CovarianceOptions fixed;
    fixed.bandwidth = 0.3;
    const CovSurface c0 = estimate_covariance(d, fixed), c1 = estimate_covariance(a, fixed);
    CHECK((c1.values - 6.25 * c0.values).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(*c1.noise_variance == doctest::Approx(6.25 * *c0.noise_variance).epsilon(1e-9));
}

TEST_CASE("diagonal correction removes white noise") {
    const auto basis = sim::make_basis(sim::BasisName::wiener, 3, Grid1D::linspace(0.0, 1.0, 51));
    auto s = sim::simulate_kl(basis, sim::decay_values(sim::DecayKind::linear, 3), 1000, 23);
    sim::add_noise(s, 0.1, 23);
    const CovSurface c = estimate_covariance(*s.noisy_data);
    CHECK(c.diagonal_corrected);
    REQUIRE(c.noise_variance);
    CHECK(*c.noise_variance == doctest::Approx(0.1).epsilon(0.25));
    REQUIRE(c.bandwidth);
    CHECK(*c.bandwidth > 0.0);
    CHECK((c.values - c.values.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("spectrum of a known covariance") {
    const Grid1D g = Grid1D::linspace(0.0, 1.0, 101);
    const auto basis = sim::make_basis(sim::BasisName::fourier, 3, g, true);
    const std::vector<double> lam{4.0, 1.0, 0.25};
    RowMatrix cov = RowMatrix::Zero(101, 101);
    for (Eigen::Index j = 0; j < 3; ++j) {
        cov += lam[static_cast<std::size_t>(j)] * basis.functions.row(j).transpose() * basis.functions.row(j);
    }
    const CovSurface surface{g, g, cov, cov, RowMatrix::Constant(101, 101, 1.0), false, std::nullopt, std::nullopt};
    const Spectrum sp = covariance_spectrum(surface);
    const auto w = trapezoid_weights(g.points());
    for (Eigen::Index j = 0; j < 3; ++j) {
        CHECK(sp.values(j) == doctest::Approx(lam[static_cast<std::size_t>(j)]).epsilon(1e-10));
        double ip = 0.0;
        for (Eigen::Index i = 0; i < 101; ++i) ip += w[static_cast<std::size_t>(i)] * sp.functions(j, i) * basis.functions(j, i);
        CHECK(std::abs(ip) == doctest::Approx(1.0).epsilon(1e-10));
        Eigen::Index arg = 0;
        sp.functions.row(j).cwiseAbs().maxCoeff(&arg);
        CHECK(sp.functions(j, arg) > 0.0);
    }
    CHECK(std::abs(sp.values(3)) < 1e-10);
}

TEST_CASE("fix_sign") {
    Eigen::RowVectorXd v(3);
    v << 0.5, -2.0, 1.0;
    fix_sign(v);
    CHECK(v(1) == 2.0);
    CHECK(v(0) == -0.5);
}

TEST_CASE("irregular data are pooled on the union grid") {
    const IrregularFD irr({"t"}, {IrregularObs{{Grid1D({0.0, 0.5})}, {1.0, 2.0}},
                                  IrregularObs{{Grid1D({0.5, 1.0})}, {4.0, 6.0}}});
    const DenseFD m = estimate_mean(irr);
    CHECK(m.grid().vector() == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(m.at(0, 0) == 1.0);
    CHECK(m.at(0, 1) == 3.0);
    CHECK(m.at(0, 2) == 6.0);
}
