#include "fundata/fcubt.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fundata/errors.hpp"
#include "fundata/rng.hpp"

namespace fundata::fcubt {

namespace {

std::uint64_t mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(seed ^ splitmix64(a)) ^ b);
}

std::vector<double> broadcast(const std::vector<double>& n_comp, std::size_t p) {
    if (n_comp.size() == p) return n_comp;
    if (n_comp.size() == 1) return std::vector<double>(p, n_comp[0]);
    throw ValidationError("n_comp has " + std::to_string(n_comp.size()) + " entries for " + std::to_string(p) +
                          " components");
}

std::vector<int> argmax_rows(const RowMatrix& p) {
    std::vector<int> out(static_cast<std::size_t>(p.rows()));
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        Eigen::Index arg = 0;
        for (Eigen::Index k = 1; k < p.cols(); ++k) {
            if (p(i, k) > p(i, arg)) arg = k;
        }
        out[static_cast<std::size_t>(i)] = static_cast<int>(arg);
    }
    return out;
}

class Grower {
public:
    Grower(const MultivariateFD& sample, FcubtTree& tree) : sample_(sample), tree_(tree) {
        n_comp_ = broadcast(tree.config.n_comp, sample.n_components());
    }

    void grow(std::size_t pos) {
        // Nodes are appended while recursing; work on a copy of the fields.
        const std::size_t depth = tree_.nodes[pos].depth;
        const std::uint64_t index = tree_.nodes[pos].index;
        const std::vector<std::size_t> members = tree_.nodes[pos].members;
        const auto& cfg = tree_.config;
        if (members.size() < cfg.min_size || members.size() < 2) {
            tree_.nodes[pos].note = "fewer than min_size members";
            return;
        }
        pca::MfpcaModel model;
        gmm::Selection sel;
        try {
            model = pca::mfpca_fit(select(sample_, members), n_comp_, cfg.mfpca);
            sel = gmm::gmm_select_k(model.scores, cfg.k_max, mix(cfg.seed, depth, index), cfg.gmm);
        } catch (const Error& e) {
            if (pos == 0) throw;
            tree_.nodes[pos].note = std::string("stopped: ") + e.what();
            return;
        }
        Node& node = tree_.nodes[pos];
        node.k_hat = sel.k_hat;
        node.mfpca = std::move(model);
        if (sel.k_hat == 1 || sel.models.size() < 2) return;
        const gmm::GmmModel& m2 = sel.models[1];
        const auto assign = argmax_rows(gmm::gmm_posterior(m2, node.mfpca->scores));
        std::vector<std::size_t> left, right;
        for (std::size_t i = 0; i < members.size(); ++i) (assign[i] == 0 ? left : right).push_back(members[i]);
        if (left.size() < cfg.min_size || right.size() < cfg.min_size || left.empty() || right.empty()) {
            node.note = "split rejected: a child would have fewer than min_size members";
            return;
        }
        node.split = m2;
        node.terminal = false;
        const auto l = static_cast<long>(tree_.nodes.size());
        node.left = l;
        node.right = l + 1;
        Node lc, rc;
        lc.depth = rc.depth = depth + 1;
        lc.index = 2 * index;
        rc.index = 2 * index + 1;
        lc.parent = rc.parent = static_cast<long>(pos);
        lc.members = std::move(left);
        rc.members = std::move(right);
        tree_.nodes.push_back(std::move(lc));
        tree_.nodes.push_back(std::move(rc));
        grow(static_cast<std::size_t>(l));
        grow(static_cast<std::size_t>(l + 1));
    }

private:
    const MultivariateFD& sample_;
    FcubtTree& tree_;
    std::vector<double> n_comp_;
};

void label_leaves(FcubtTree& tree, std::size_t pos, int& next) {
    Node& node = tree.nodes[pos];
    if (node.terminal) {
        node.leaf_label = next++;
        return;
    }
    label_leaves(tree, static_cast<std::size_t>(node.left), next);
    label_leaves(tree, static_cast<std::size_t>(node.right), next);
}

}  // namespace

std::vector<int> FcubtTree::leaf_labels() const {
    std::vector<int> out(n_obs, -1);
    for (const auto& node : nodes) {
        if (!node.terminal) continue;
        for (std::size_t m : node.members) out[m] = node.leaf_label;
    }
    return out;
}

std::vector<int> FcubtTree::labels() const {
    auto out = leaf_labels();
    for (int& l : out) l = leaf_to_class[static_cast<std::size_t>(l)];
    return out;
}

FcubtTree grow(const MultivariateFD& sample, const FcubtConfig& config) {
    if (config.min_size == 0) throw ValidationError("min_size must be at least 1");
    if (config.k_max < 2) throw ValidationError("k_max must be at least 2");
    FcubtTree tree;
    tree.config = config;
    tree.n_obs = sample.n_obs();
    Node root;
    root.members.resize(tree.n_obs);
    for (std::size_t i = 0; i < tree.n_obs; ++i) root.members[i] = i;
    tree.nodes.push_back(std::move(root));
    Grower(sample, tree).grow(0);
    int next = 0;
    label_leaves(tree, 0, next);
    tree.n_leaves = static_cast<std::size_t>(next);
    tree.leaf_to_class.resize(tree.n_leaves);
    for (std::size_t l = 0; l < tree.n_leaves; ++l) tree.leaf_to_class[l] = static_cast<int>(l);
    tree.n_classes = tree.n_leaves;
    return tree;
}

namespace {

struct Vertex {
    std::vector<std::size_t> members;  // sorted
    std::vector<int> leaves;           // sorted leaf labels
    std::pair<std::size_t, std::uint64_t> id;  // smallest node id among its leaves
};

struct Edge {
    std::size_t a = 0, b = 0;  // positions in the vertex list
    double bic = 0.0;
};

// bic of the one-component model when K-hat is 1 on the union, otherwise nothing.
std::optional<double> union_bic(const MultivariateFD& sample, const Vertex& x, const Vertex& y,
                                const std::vector<double>& n_comp, const FcubtConfig& cfg) {
    std::vector<std::size_t> members;
    std::merge(x.members.begin(), x.members.end(), y.members.begin(), y.members.end(), std::back_inserter(members));
    try {
        const auto model = pca::mfpca_fit(select(sample, members), n_comp, cfg.mfpca);
        const auto seed = mix(cfg.seed ^ 0x6a6f696eULL, static_cast<std::uint64_t>(x.leaves.front()),
                              static_cast<std::uint64_t>(y.leaves.front()));
        const auto sel = gmm::gmm_select_k(model.scores, cfg.k_max, seed, cfg.gmm);
        if (sel.k_hat != 1) return std::nullopt;
        return sel.models[0].bic;
    } catch (const Error&) {
        return std::nullopt;
    }
}

}  // namespace

std::size_t join(FcubtTree& tree, const MultivariateFD& sample, const std::vector<double>& n_comp_in) {
    const auto n_comp = broadcast(n_comp_in, sample.n_components());
    std::vector<Vertex> vertices;
    for (const auto& node : tree.nodes) {
        if (!node.terminal) continue;
        vertices.push_back({node.members, {node.leaf_label}, {node.depth, node.index}});
    }
    std::sort(vertices.begin(), vertices.end(),
              [](const Vertex& a, const Vertex& b) { return a.leaves.front() < b.leaves.front(); });
    std::vector<bool> alive(vertices.size(), true);
    std::vector<Edge> edges;
    auto add_edges_for = [&](std::size_t v) {
        for (std::size_t u = 0; u < vertices.size(); ++u) {
            if (u == v || !alive[u]) continue;
            const auto bic = union_bic(sample, vertices[std::min(u, v)], vertices[std::max(u, v)], n_comp, tree.config);
            if (bic) edges.push_back({std::min(u, v), std::max(u, v), *bic});
        }
    };
    for (std::size_t a = 0; a < vertices.size(); ++a) {
        for (std::size_t b = a + 1; b < vertices.size(); ++b) {
            const auto bic = union_bic(sample, vertices[a], vertices[b], n_comp, tree.config);
            if (bic) edges.push_back({a, b, *bic});
        }
    }
    std::size_t merges = 0;
    while (!edges.empty()) {
        auto key = [&](const Edge& e) {
            return std::make_pair(std::min(vertices[e.a].id, vertices[e.b].id), std::max(vertices[e.a].id, vertices[e.b].id));
        };
        const auto best = std::min_element(edges.begin(), edges.end(), [&](const Edge& x, const Edge& y) {
            if (x.bic != y.bic) return x.bic > y.bic;
            return key(x) < key(y);
        });
        const Edge e = *best;
        Vertex merged;
        std::merge(vertices[e.a].members.begin(), vertices[e.a].members.end(), vertices[e.b].members.begin(),
                   vertices[e.b].members.end(), std::back_inserter(merged.members));
        std::merge(vertices[e.a].leaves.begin(), vertices[e.a].leaves.end(), vertices[e.b].leaves.begin(),
                   vertices[e.b].leaves.end(), std::back_inserter(merged.leaves));
        merged.id = std::min(vertices[e.a].id, vertices[e.b].id);
        alive[e.a] = alive[e.b] = false;
        std::erase_if(edges, [&](const Edge& x) { return x.a == e.a || x.b == e.a || x.a == e.b || x.b == e.b; });
        vertices.push_back(std::move(merged));
        alive.push_back(true);
        ++merges;
        add_edges_for(vertices.size() - 1);
    }

    std::vector<const Vertex*> final;
    for (std::size_t v = 0; v < vertices.size(); ++v) {
        if (alive[v]) final.push_back(&vertices[v]);
    }
    std::sort(final.begin(), final.end(), [](const Vertex* a, const Vertex* b) { return a->leaves.front() < b->leaves.front(); });
    for (std::size_t c = 0; c < final.size(); ++c) {
        for (int leaf : final[c]->leaves) tree.leaf_to_class[static_cast<std::size_t>(leaf)] = static_cast<int>(c);
    }
    tree.n_classes = final.size();
    tree.joined = true;
    return merges;
}

namespace {

// Posterior of the left child at every internal node for every observation.
std::vector<Eigen::VectorXd> split_probabilities(const FcubtTree& tree, const MultivariateFD& fd) {
    std::vector<Eigen::VectorXd> out(tree.nodes.size());
    for (std::size_t pos = 0; pos < tree.nodes.size(); ++pos) {
        const Node& node = tree.nodes[pos];
        if (node.terminal) continue;
        const RowMatrix scores = pca::mfpca_transform(*node.mfpca, fd);
        out[pos] = gmm::gmm_posterior(*node.split, scores).col(0);
    }
    return out;
}

}  // namespace

std::vector<int> predict(const FcubtTree& tree, const MultivariateFD& fd) {
    const auto probs = split_probabilities(tree, fd);
    std::vector<int> out(fd.n_obs());
    for (std::size_t i = 0; i < fd.n_obs(); ++i) {
        std::size_t pos = 0;
        while (!tree.nodes[pos].terminal) {
            const double p_left = probs[pos](static_cast<Eigen::Index>(i));
            pos = static_cast<std::size_t>(p_left >= 1.0 - p_left ? tree.nodes[pos].left : tree.nodes[pos].right);
        }
        out[i] = tree.leaf_to_class[static_cast<std::size_t>(tree.nodes[pos].leaf_label)];
    }
    return out;
}

RowMatrix predict_proba(const FcubtTree& tree, const MultivariateFD& fd) {
    const auto probs = split_probabilities(tree, fd);
    const auto n = static_cast<Eigen::Index>(fd.n_obs());
    RowMatrix out = RowMatrix::Zero(n, static_cast<Eigen::Index>(tree.n_classes));
    std::vector<Eigen::VectorXd> reach(tree.nodes.size());
    reach[0] = Eigen::VectorXd::Ones(n);
    // Children are stored after their parent, so one forward pass suffices.
    for (std::size_t pos = 0; pos < tree.nodes.size(); ++pos) {
        const Node& node = tree.nodes[pos];
        if (node.terminal) {
            out.col(tree.leaf_to_class[static_cast<std::size_t>(node.leaf_label)]) += reach[pos];
            continue;
        }
        reach[static_cast<std::size_t>(node.left)] = reach[pos].cwiseProduct(probs[pos]);
        reach[static_cast<std::size_t>(node.right)] =
            reach[pos].cwiseProduct((Eigen::VectorXd::Ones(n) - probs[pos]));
    }
    return out;
}

namespace {

std::string node_name(const Node& n) { return "n" + std::to_string(n.depth) + "_" + std::to_string(n.index); }

}  // namespace

std::string export_dot(const FcubtTree& tree) {
    std::ostringstream out;
    out << "digraph fcubt {\n  node [shape=box, fontname=\"Helvetica\"];\n";
    for (const auto& n : tree.nodes) {
        out << "  " << node_name(n) << " [label=\"(" << n.depth << "," << n.index << ")\\nn=" << n.members.size()
            << "\\nK=" << n.k_hat;
        if (n.terminal) {
            out << "\\nleaf " << n.leaf_label << " class " << tree.leaf_to_class[static_cast<std::size_t>(n.leaf_label)]
                << "\", shape=ellipse];\n";
        } else {
            out << "\"];\n";
        }
    }
    for (const auto& n : tree.nodes) {
        if (n.terminal) continue;
        out << "  " << node_name(n) << " -> " << node_name(tree.nodes[static_cast<std::size_t>(n.left)]) << ";\n";
        out << "  " << node_name(n) << " -> " << node_name(tree.nodes[static_cast<std::size_t>(n.right)]) << ";\n";
    }
    out << "}\n";
    return out.str();
}

TreeStructure structure(const FcubtTree& tree) {
    TreeStructure s;
    for (std::size_t pos = 0; pos < tree.nodes.size(); ++pos) {
        const Node& n = tree.nodes[pos];
        s.nodes.push_back({n.depth, n.index, n.members.size(), n.k_hat, n.terminal, n.leaf_label});
        if (!n.terminal) {
            s.edges.emplace_back(pos, static_cast<std::size_t>(n.left));
            s.edges.emplace_back(pos, static_cast<std::size_t>(n.right));
        }
    }
    s.leaf_to_class = tree.leaf_to_class;
    return s;
}

std::string export_json(const FcubtTree& tree) {
    using nlohmann::json;
    const TreeStructure s = structure(tree);
    json nodes = json::array();
    for (std::size_t k = 0; k < s.nodes.size(); ++k) {
        const NodeInfo& n = s.nodes[k];
        nodes.push_back({{"depth", n.depth},
                         {"index", n.index},
                         {"size", n.size},
                         {"k_hat", n.k_hat},
                         {"terminal", n.terminal},
                         {"leaf_label", n.leaf_label}});
        if (!tree.nodes[k].note.empty()) nodes.back()["note"] = tree.nodes[k].note;
    }
    json edges = json::array();
    for (const auto& [p, c] : s.edges) edges.push_back({p, c});
    json cfg = {{"n_comp", tree.config.n_comp},
                {"min_size", tree.config.min_size},
                {"k_max", tree.config.k_max},
                {"seed", tree.config.seed}};
    const json doc = {{"format", "fundata-fcubt-tree"}, {"version", 1},          {"config", cfg},
                      {"n_obs", tree.n_obs},            {"nodes", nodes},        {"edges", edges},
                      {"joined", tree.joined},          {"leaf_to_class", s.leaf_to_class}};
    return doc.dump(1) + "\n";
}

TreeStructure import_json(const std::string& text) {
    using nlohmann::json;
    try {
        const json doc = json::parse(text);
        if (doc.at("format").get<std::string>() != "fundata-fcubt-tree") throw IoError("not a fundata tree document");
        if (doc.at("version").get<int>() != 1) throw IoError("unsupported tree document version");
        TreeStructure s;
        for (const auto& n : doc.at("nodes")) {
            s.nodes.push_back({n.at("depth").get<std::size_t>(), n.at("index").get<std::uint64_t>(),
                               n.at("size").get<std::size_t>(), n.at("k_hat").get<std::size_t>(),
                               n.at("terminal").get<bool>(), n.at("leaf_label").get<int>()});
        }
        for (const auto& e : doc.at("edges")) s.edges.emplace_back(e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>());
        s.leaf_to_class = doc.at("leaf_to_class").get<std::vector<int>>();
        return s;
    } catch (const json::exception& e) {
        throw IoError(std::string("tree document is malformed: ") + e.what());
    }
}

}  // namespace fundata::fcubt
