#include <doctest.h>

#include <set>

#include "fundata/basis.hpp"
#include "fundata/errors.hpp"
#include "fundata/fcubt.hpp"
#include "fundata/metrics.hpp"
#include "fundata/simulation.hpp"

using namespace fundata;
using namespace fundata::fcubt;

namespace {

sim::SimOutput clusters(std::size_t n, std::uint64_t seed, double scale) {
    const auto basis = sim::make_basis(sim::BasisName::wiener, 3, Grid1D::linspace(0.0, 1.0, 51));
    sim::ClusterSpec spec;
    spec.mixing = {0.5, 0.5};
    spec.centers = Eigen::MatrixXd(3, 2);
    spec.centers << 2.0 * scale, -1.0 * scale, -0.5 * scale, 1.5 * scale, 0.0, 0.0;
    spec.cluster_std = Eigen::MatrixXd(3, 2);
    spec.cluster_std << 2.0, 1.0, 0.5, 1.0, 1.0, 1.0;
    return sim::simulate_kl(basis, spec, n, seed);
}

FcubtConfig raw_config() {
    FcubtConfig c;
    c.mfpca.ufpca.covariance.smooth_diagonal = false;
    return c;
}

}  // namespace

TEST_CASE("two separated clusters give two classes") {
    const auto s = clusters(120, 51, 3.0);
    const MultivariateFD fd({s.data});
    FcubtTree tree = grow(fd, raw_config());
    CHECK(tree.n_leaves >= 2);
    const std::size_t before = tree.n_classes;
    join(tree, fd, {0.95});
    CHECK(tree.joined);
    CHECK(tree.n_classes <= before);
    CHECK(adjusted_rand_index(tree.labels(), s.labels) > 0.9);

    const auto pred = predict(tree, fd);
    CHECK(pred == tree.labels());
    const RowMatrix proba = predict_proba(tree, fd);
    CHECK(static_cast<std::size_t>(proba.cols()) == tree.n_classes);
    CHECK((proba.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-10);
}

TEST_CASE("tree structure invariants") {
    const auto s = clusters(100, 52, 3.0);
    const MultivariateFD fd({s.data});
    FcubtConfig cfg = raw_config();
    cfg.min_size = 10;
    const FcubtTree tree = grow(fd, cfg);
    std::set<int> leaves;
    for (const Node& n : tree.nodes) {
        if (n.terminal) {
            leaves.insert(n.leaf_label);
        } else {
            const Node& l = tree.nodes[static_cast<std::size_t>(n.left)];
            const Node& r = tree.nodes[static_cast<std::size_t>(n.right)];
            CHECK(l.members.size() + r.members.size() == n.members.size());
            CHECK(l.depth == n.depth + 1);
            CHECK(l.index == 2 * n.index);
            CHECK(r.index == 2 * n.index + 1);
            CHECK(l.members.size() >= cfg.min_size);
            CHECK(r.members.size() >= cfg.min_size);
        }
    }
    CHECK(leaves.size() == tree.n_leaves);
    CHECK(*leaves.begin() == 0);
    const auto ll = tree.leaf_labels();
    CHECK(ll.size() == 100);
}

TEST_CASE("growth is deterministic and JSON export round trips") {
    const auto s = clusters(80, 53, 3.0);
    const MultivariateFD fd({s.data});
    FcubtTree a = grow(fd, raw_config());
    FcubtTree b = grow(fd, raw_config());
    CHECK(export_json(a) == export_json(b));
    CHECK(export_dot(a) == export_dot(b));
    CHECK(import_json(export_json(a)) == structure(a));
    CHECK(export_dot(a).rfind("digraph", 0) == 0);
    CHECK_THROWS_AS(import_json("{\"format\":\"fundata-fcubt-tree\",\"version\":3}"), IoError);
}

TEST_CASE("a node below min_size is a leaf") {
    const auto s = clusters(30, 54, 3.0);
    FcubtConfig cfg = raw_config();
    cfg.min_size = 40;
    const FcubtTree tree = grow(MultivariateFD({s.data}), cfg);
    CHECK(tree.nodes.size() == 1);
    CHECK(tree.n_classes == 1);
    CHECK_FALSE(tree.nodes[0].note.empty());
}
