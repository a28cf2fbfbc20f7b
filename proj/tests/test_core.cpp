#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "fundata/basis.hpp"
#include "fundata/errors.hpp"
#include "fundata/functional_data.hpp"
#include "fundata/metrics.hpp"
#include "fundata/rng.hpp"
#include "test_util.hpp"

using namespace fundata;

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(Grid1D({}), ValidationError);
    CHECK_THROWS_AS(Grid1D({0.0, 0.0}), ValidationError);
    CHECK_THROWS_AS(Grid1D({1.0, 0.5}), ValidationError);
    CHECK_THROWS_AS(Grid1D({0.0, NAN}), ValidationError);
    const Grid1D g = Grid1D::linspace(2.0, 4.0, 5);
    CHECK(g.size() == 5);
    CHECK(g[4] == 4.0);
    CHECK(g.find(2.5) == 1);
    CHECK(g.find(2.6) == 5);
    const Grid1D s = g.standardized();
    CHECK(s.front() == 0.0);
    CHECK(s.back() == 1.0);
    CHECK(Grid1D({3.0}).standardized()[0] == 0.0);
}

TEST_CASE("trapezoid weights integrate linear functions exactly") {
    const Grid1D g({0.0, 0.1, 0.35, 0.7, 1.0});
    const auto w = trapezoid_weights(g.points());
    double area = 0.0, total = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        area += w[i] * (2.0 * g[i] + 1.0);
        total += w[i];
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(area == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(trapezoid_weights(Grid1D({5.0}).points())[0] == 1.0);
}

TEST_CASE("interpolation and grid specs") {
    const Grid1D g({0.0, 1.0, 3.0});
    const std::vector<double> v{0.0, 2.0, 6.0};
    CHECK(interpolate(g, v, 2.0) == doctest::Approx(4.0));
    CHECK(interpolate(g, v, 3.0) == 6.0);
    CHECK_THROWS_AS(interpolate(g, v, 3.5), ValidationError);
    const Grid1D p = parse_grid_spec("0:1:11");
    CHECK(p.size() == 11);
    CHECK(p[10] == 1.0);
    CHECK_THROWS_AS(parse_grid_spec("0:1"), ValidationError);
    CHECK_THROWS_AS(parse_grid_spec("0:1:x"), ValidationError);
}

TEST_CASE("dense container shape and validation") {
    const DenseFD d = test::random_dense(4, 6, 1);
    CHECK(d.n_obs() == 4);
    CHECK(d.n_cells() == 6);
    CHECK(d.shape() == std::vector<std::size_t>{4, 6});
    CHECK_FALSE(d.has_missing());
    CHECK_THROWS_AS(DenseFD(DenseArgvals{{"x", Grid1D::linspace(0, 1, 3)}}, std::vector<double>(7)), ValidationError);
    CHECK_THROWS_AS(DenseFD(DenseArgvals{{"x", Grid1D::linspace(0, 1, 3)}, {"x", Grid1D::linspace(0, 1, 2)}},
                            std::vector<double>(6)),
                    ValidationError);

    const DenseFD img(DenseArgvals{{"x", Grid1D::linspace(0, 1, 2)}, {"y", Grid1D::linspace(0, 1, 3)}},
                      {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11});
    CHECK(img.n_obs() == 2);
    CHECK(img.at(1, 1, 2) == 11.0);
}

TEST_CASE("irregular container renumbers keys and checks shapes") {
    IrregularArgvals args{{"t", {{7, Grid1D({0.0, 0.5})}, {3, Grid1D({0.25})}}}};
    std::map<std::size_t, std::vector<double>> vals{{7, {1.0, 2.0}}, {3, {5.0}}};
    const IrregularFD irr = IrregularFD::from_maps(args, vals);
    CHECK(irr.n_obs() == 2);
    CHECK(irr.obs(0).values == std::vector<double>{5.0});
    CHECK(irr.union_grid().vector() == std::vector<double>{0.0, 0.25, 0.5});
    vals.erase(3);
    CHECK_THROWS_AS(IrregularFD::from_maps(args, vals), ValidationError);
    CHECK_THROWS_AS(IrregularFD({"t"}, {IrregularObs{{Grid1D({0.0, 1.0})}, {1.0}}}), ValidationError);
}

TEST_CASE("dense and irregular conversions are inverse") {
    RowMatrix x(3, 4);
    x << 1, kMissing, 3, 4,
         kMissing, 2, kMissing, 5,
         6, 7, 8, 9;
    const DenseFD d(Grid1D({0.0, 0.2, 0.5, 1.0}), x);
    CHECK(d.has_missing());
    const IrregularFD irr = to_irregular(d);
    CHECK(irr.obs(1).grids[0].vector() == std::vector<double>{0.2, 1.0});
    CHECK(same_content(to_dense(irr), d));
    CHECK(same_content(to_irregular(to_dense(irr)), irr));
}

TEST_CASE("2-D dense to irregular drops empty rows and columns only") {
    const DenseArgvals args{{"x", Grid1D::linspace(0, 1, 2)}, {"y", Grid1D::linspace(0, 1, 2)}};
    const DenseFD ok(args, {1, kMissing, 3, kMissing});
    const IrregularFD irr = to_irregular(ok);
    CHECK(irr.obs(0).grids[1].size() == 1);
    CHECK(same_content(to_dense(irr), DenseFD(DenseArgvals{{"x", args[0].grid}, {"y", Grid1D({0.0})}}, {1, 3})));
    const DenseFD bad(args, {1, kMissing, 3, 4});
    CHECK_THROWS_AS(to_irregular(bad), ValidationError);
}

TEST_CASE("subset, select and concatenate") {
    const DenseFD d = test::random_dense(35, 10, 2);
    const DenseFD s = subset(d, 5, 13);
    CHECK(s.n_obs() == 8);
    CHECK(describe(UnivariateFD(s)) == "Univariate functional data object with 8 observations on a 1-dimensional support.");
    CHECK(s.at(0, 3) == d.at(5, 3));
    CHECK_THROWS_AS(subset(d, 5, 5), ValidationError);
    CHECK_THROWS_AS(subset(d, 30, 36), ValidationError);

    const std::vector<std::size_t> idx{4, 0, 4};
    const DenseFD picked = select(d, idx);
    CHECK(picked.at(2, 9) == d.at(4, 9));
    CHECK(picked.at(1, 0) == d.at(0, 0));

    const std::vector<UnivariateFD> parts{subset(d, 0, 20), subset(d, 20, 35)};
    CHECK(same_content(std::get<DenseFD>(concatenate(parts)), d));
}

TEST_CASE("multivariate container operations") {
    const DenseFD a = test::random_dense(5, 4, 3);
    const DenseFD b = test::random_dense(5, 7, 4);
    MultivariateFD m({a, b});
    CHECK(m.n_components() == 2);
    CHECK(m.n_obs() == 5);
    CHECK_THROWS_AS(MultivariateFD({a, test::random_dense(4, 4, 5)}), ValidationError);
    CHECK(iterate_obs(m).size() == 5);
    CHECK(describe(m) == "Multivariate functional data object with 2 functions of 5 observations.");
    const UnivariateFD popped = m.pop(0);
    CHECK(std::get<DenseFD>(popped).n_cells() == 4);
    CHECK_THROWS_AS(m.pop(0), ValidationError);
}

TEST_CASE("summary of irregular data reports mean point counts") {
    const IrregularFD irr({"t"}, {IrregularObs{{Grid1D({0.0, 1.0})}, {1.0, 2.0}},
                                  IrregularObs{{Grid1D({0.0, 0.5, 2.0, 3.0})}, {1.0, -2.0, 0.0, 4.0}}});
    const FDSummary s = summary(irr);
    CHECK(s.n_obs == 2);
    CHECK(s.n_points_is_mean);
    CHECK(s.n_points[0] == 3.0);
    CHECK(s.range_obs.first == -2.0);
    CHECK(s.range_obs.second == 4.0);
    CHECK(s.range_points[0].second == 3.0);
}

TEST_CASE("rng streams are reproducible and distinct") {
    Rng a(42, 1), b(42, 1), c(42, 2);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const double x = a.normal();
        CHECK(x == b.normal());
        differs = differs || (x != c.normal());
    }
    CHECK(differs);
    Rng r(7);
    double sum = 0.0, sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = r.normal();
        sum += z;
        sq += z * z;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(std::abs(sq / n - 1.0) < 0.02);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) seen.insert(r.below(5));
    CHECK(seen.size() == 5);
    CHECK(*seen.rbegin() == 4);
}

TEST_CASE("bases are orthonormal under the trapezoid rule") {
    const Grid1D g = Grid1D::linspace(0.0, 1.0, 101);
    const auto w = sim::quadrature_weights({g});
    for (auto name : {sim::BasisName::legendre, sim::BasisName::wiener, sim::BasisName::fourier,
                      sim::BasisName::bsplines}) {
        for (std::size_t j : {1u, 3u, 7u, 10u}) {
            const auto basis = sim::make_basis(name, j, g);
            const auto gram = sim::gram_matrix(basis.functions, w);
            CHECK((gram - Eigen::MatrixXd::Identity(j, j)).cwiseAbs().maxCoeff() < 1e-2);
            const auto on = sim::make_basis(name, j, g, true);
            CHECK((sim::gram_matrix(on.functions, w) - Eigen::MatrixXd::Identity(j, j)).cwiseAbs().maxCoeff() < 1e-6);
        }
    }
    CHECK_THROWS_AS(sim::parse_basis_name("haar"), ValidationError);
}

TEST_CASE("wiener basis matches its closed form") {
    const Grid1D g = Grid1D::linspace(0.0, 1.0, 11);
    const auto basis = sim::make_basis(sim::BasisName::wiener, 2, g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(basis.functions(1, static_cast<Eigen::Index>(i)) ==
              doctest::Approx(std::sqrt(2.0) * std::sin(1.5 * M_PI * g[i])).epsilon(1e-12));
    }
}

TEST_CASE("tensor product basis") {
    const auto bx = sim::make_basis(sim::BasisName::fourier, 3, Grid1D::linspace(0, 1, 21));
    const auto by = sim::make_basis(sim::BasisName::legendre, 2, Grid1D::linspace(0, 2, 31));
    const auto t = sim::tensor_basis_2d(bx, by);
    CHECK(t.n_functions() == 6);
    CHECK(t.n_cells() == 21 * 31);
    CHECK(t.functions(5, 40) == doctest::Approx(bx.functions(2, 1) * by.functions(1, 9)));
    const auto gram = sim::gram_matrix(t.functions, sim::quadrature_weights(t.grids));
    CHECK((gram - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-2);
}

TEST_CASE("decay values") {
    const auto lin = sim::decay_values(sim::DecayKind::linear, 4);
    CHECK(lin.values == std::vector<double>{1.0, 0.75, 0.5, 0.25});
    const auto ex = sim::decay_values(sim::DecayKind::exponential, 3);
    CHECK(ex.values[0] == doctest::Approx(std::exp(-1.0)));
    CHECK(ex.values[2] == doctest::Approx(std::exp(-2.0)));
    const auto wi = sim::decay_values(sim::DecayKind::wiener, 2);
    CHECK(wi.values[1] == doctest::Approx(1.0 / (2.25 * M_PI * M_PI)));
    CHECK_THROWS_AS(sim::user_decay({1.0, 2.0}), ValidationError);
    CHECK_THROWS_AS(sim::user_decay({1.0, -0.1}), ValidationError);
}

TEST_CASE("adjusted rand index") {
    const std::vector<int> a{0, 0, 1, 1, 2, 2};
    const std::vector<int> relabeled{5, 5, 3, 3, 9, 9};
    CHECK(adjusted_rand_index(a, relabeled) == doctest::Approx(1.0));
    // Hand-computed contingency example: sum C(n_ij,2)=2, rows 2+2... see expected value below.
    const std::vector<int> x{0, 0, 0, 1, 1, 1};
    const std::vector<int> y{0, 0, 1, 1, 2, 2};
    // index = 2, expected = 6 * 3 / 15 = 1.2, max = (6 + 3) / 2 = 4.5
    CHECK(adjusted_rand_index(x, y) == doctest::Approx((2.0 - 1.2) / (4.5 - 1.2)).epsilon(1e-12));
    CHECK_THROWS_AS(adjusted_rand_index(x, std::vector<int>{0, 1}), ValidationError);
}
