#include <iostream>
#include <optional>

#include <json.hpp>

#include "cli_common.hpp"
#include "fundata/fcubt.hpp"
#include "fundata/io.hpp"

namespace fundata::cli {

namespace {

struct FcubtFlags {
    std::string input;
    std::string output;
    std::string n_comp = "0.95";
    std::size_t min_size = 5;
    std::size_t k_max = 5;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> join;
    std::string tree_dot;
    std::string tree_json;
    std::string predict;
    std::string predict_output;
    std::string proba_output;
    bool raw = false;
};

std::vector<double> per_component(std::vector<double> v, std::size_t p) {
    if (v.size() == 1) v.assign(p, v[0]);
    if (v.size() != p) {
        throw UsageError("--n-comp has " + std::to_string(v.size()) + " entries for " + std::to_string(p) +
                         " components");
    }
    return v;
}

void run(const FcubtFlags& f) {
    if (!f.predict.empty() && f.predict_output.empty() && f.proba_output.empty()) {
        throw UsageError("--predict needs --predict-output or --proba-output");
    }
    if (f.predict.empty() && (!f.predict_output.empty() || !f.proba_output.empty())) {
        throw UsageError("--predict-output and --proba-output need --predict");
    }
    const MultivariateFD fd = io::read_any(f.input);
    fcubt::FcubtConfig config;
    config.n_comp = per_component(parse_list(f.n_comp, "--n-comp"), fd.n_components());
    config.min_size = f.min_size;
    config.k_max = f.k_max;
    config.seed = f.seed.value_or(default_seed());
    config.mfpca.ufpca.covariance.smooth_diagonal = !f.raw;

    fcubt::FcubtTree tree = fcubt::grow(fd, config);
    std::size_t merges = 0;
    if (f.join) {
        const std::string text = f.join->empty() ? f.n_comp : *f.join;
        merges = fcubt::join(tree, fd, per_component(parse_list(text, "--join"), fd.n_components()));
    }
    const std::vector<int> labels = tree.labels();
    io::write_labels(labels, f.output);
    if (!f.tree_dot.empty()) io::write_file_atomic(f.tree_dot, fcubt::export_dot(tree));
    if (!f.tree_json.empty()) io::write_file_atomic(f.tree_json, fcubt::export_json(tree));
    if (!f.predict.empty()) {
        const MultivariateFD fresh = io::read_any(f.predict);
        if (!f.predict_output.empty()) io::write_labels(fcubt::predict(tree, fresh), f.predict_output);
        if (!f.proba_output.empty()) write_matrix(fcubt::predict_proba(tree, fresh), f.proba_output, "class_");
    }
    const nlohmann::json summary = {{"n_obs", tree.n_obs},
                                    {"n_nodes", tree.nodes.size()},
                                    {"n_leaves", tree.n_leaves},
                                    {"n_classes", tree.n_classes},
                                    {"merges", merges}};
    std::cout << summary.dump() << '\n';
}

}  // namespace

void register_fcubt(CLI::App& app, Action& action) {
    auto f = std::make_shared<FcubtFlags>();
    auto* sub = app.add_subcommand("fcubt", "Unsupervised clustering with a binary tree of MFPCA + GMM splits");
    sub->add_option("-i,--input", f->input, "Training data (CSV, .ts or manifest)")->required();
    sub->add_option("-o,--output", f->output, "Labels of the training observations")->required();
    sub->add_option("--n-comp", f->n_comp, "Per-component share (< 1) or count, comma separated")
        ->capture_default_str();
    sub->add_option("--min-size", f->min_size, "Smallest node that may be split")->capture_default_str();
    sub->add_option("--k-max", f->k_max, "Largest number of mixture components tried at a node")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", f->seed, "Random seed (default: FUNDATA_SEED or 0)");
    sub->add_option("--join", f->join, "Run the joining step, optionally with its own n_comp")
        ->expected(0, 1);
    sub->add_option("--tree-dot", f->tree_dot, "Write the tree as Graphviz");
    sub->add_option("--tree-json", f->tree_json, "Write the tree as JSON");
    sub->add_option("--predict", f->predict, "New observations to classify");
    sub->add_option("--predict-output", f->predict_output, "Labels of the --predict observations");
    sub->add_option("--proba-output", f->proba_output, "Class probabilities of the --predict observations");
    sub->add_flag("--raw-covariance", f->raw, "Skip the covariance diagonal correction");
    sub->callback([f, &action] { action = [f] { run(*f); }; });
}

}  // namespace fundata::cli
