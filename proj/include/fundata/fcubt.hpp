#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fundata/functional_data.hpp"
#include "fundata/gmm.hpp"
#include "fundata/mfpca.hpp"

namespace fundata::fcubt {

struct FcubtConfig {
    /// Per-component n_comp; a single entry applies to every component.
    std::vector<double> n_comp{0.95};
    std::size_t min_size = 5;
    std::size_t k_max = 5;
    std::uint64_t seed = 0;
    pca::MfpcaOptions mfpca{};
    gmm::GmmOptions gmm{};
};

/// Node (depth, index); the children of (d, j) are (d + 1, 2j) and (d + 1, 2j + 1).
struct Node {
    std::size_t depth = 0;
    std::uint64_t index = 0;
    /// Indices into the root sample, increasing.
    std::vector<std::size_t> members;
    std::size_t k_hat = 1;
    bool terminal = true;
    /// Node positions in FcubtTree::nodes, -1 for none.
    long left = -1;
    long right = -1;
    long parent = -1;
    /// Leaf number in left-to-right order, -1 for internal nodes.
    int leaf_label = -1;
    std::optional<pca::MfpcaModel> mfpca;
    /// Two-component mixture used for the split.
    std::optional<gmm::GmmModel> split;
    /// Why the node stopped when that was not a BIC decision.
    std::string note;
};

struct FcubtTree {
    FcubtConfig config;
    std::size_t n_obs = 0;
    std::vector<Node> nodes;
    std::size_t n_leaves = 0;
    /// Final class of every leaf label; the identity until join runs.
    std::vector<int> leaf_to_class;
    std::size_t n_classes = 0;
    bool joined = false;

    /// Final class of every training observation.
    std::vector<int> labels() const;
    /// Leaf label of every training observation.
    std::vector<int> leaf_labels() const;
};

FcubtTree grow(const MultivariateFD& sample, const FcubtConfig& config);

/// Merges leaves whose union looks like one Gaussian in the scores of a fresh
/// MFPCA fitted on the union, highest bic first. Returns the number of merges.
std::size_t join(FcubtTree& tree, const MultivariateFD& sample, const std::vector<double>& n_comp);

/// Routes each observation by the argmax posterior of every split.
std::vector<int> predict(const FcubtTree& tree, const MultivariateFD& fd);

/// (N, n_classes): products of split posteriors along root-to-leaf paths,
/// summed over leaves of the same class.
RowMatrix predict_proba(const FcubtTree& tree, const MultivariateFD& fd);

/// Graphviz document: one box per node labelled with its id, size and K.
std::string export_dot(const FcubtTree& tree);

/// JSON document ("format": "fundata-fcubt-tree", "version": 1) with the node
/// structure and the leaf-to-class map.
std::string export_json(const FcubtTree& tree);

struct NodeInfo {
    std::size_t depth = 0;
    std::uint64_t index = 0;
    std::size_t size = 0;
    std::size_t k_hat = 1;
    bool terminal = true;
    int leaf_label = -1;

    bool operator==(const NodeInfo&) const = default;
};

struct TreeStructure {
    std::vector<NodeInfo> nodes;
    std::vector<std::pair<std::size_t, std::size_t>> edges;  // parent, child positions
    std::vector<int> leaf_to_class;

    bool operator==(const TreeStructure&) const = default;
};

TreeStructure structure(const FcubtTree& tree);
TreeStructure import_json(const std::string& text);

}  // namespace fundata::fcubt
