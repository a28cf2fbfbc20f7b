#include <filesystem>
#include <iostream>

#include <json.hpp>

#include "cli_common.hpp"
#include "fundata/basis.hpp"
#include "fundata/io.hpp"
#include "fundata/mfpca.hpp"
#include "fundata/model_io.hpp"

namespace fundata::cli {

namespace {

struct FpcaFlags {
    std::string input;
    std::string out_dir;
    std::string n_comp = "0.95";
    std::string method = "numint";
    bool raw = false;
    std::string transform;
    std::string inverse;
    std::string output;
};

std::vector<double> cell_weights(const DenseArgvals& argvals) {
    std::vector<Grid1D> grids;
    for (const auto& d : argvals) grids.push_back(d.grid);
    return sim::quadrature_weights(grids);
}

// Share of the total variance left out by the reconstruction from the
// retained components, over dense complete components.
std::optional<double> reconstruction_error(const pca::MfpcaModel& model, const MultivariateFD& fd,
                                           const MultivariateFD& rec) {
    double resid = 0.0, total = 0.0;
    for (std::size_t p = 0; p < fd.n_components(); ++p) {
        const auto* d = std::get_if<DenseFD>(&fd[p]);
        if (!d || d->has_missing()) return std::nullopt;
        const auto& r = std::get<DenseFD>(rec[p]);
        const auto w = cell_weights(d->argvals());
        const auto& mean = pca::component_mean(model.bases[p]);
        for (std::size_t n = 0; n < d->n_obs(); ++n) {
            for (std::size_t c = 0; c < d->n_cells(); ++c) {
                const double x = d->at(n, c);
                resid += w[c] * (x - r.at(n, c)) * (x - r.at(n, c));
                total += w[c] * (x - mean(static_cast<Eigen::Index>(c))) * (x - mean(static_cast<Eigen::Index>(c)));
            }
        }
    }
    if (!(total > 0.0)) return 0.0;
    return resid / total;
}

void run_fit(const FpcaFlags& f) {
    if (f.out_dir.empty()) throw UsageError("fitting needs --out-dir");
    const MultivariateFD fd = io::read_any(f.input);
    std::vector<double> n_comp = parse_list(f.n_comp, "--n-comp");
    if (n_comp.size() == 1) n_comp.assign(fd.n_components(), n_comp[0]);
    if (n_comp.size() != fd.n_components()) {
        throw UsageError("--n-comp has " + std::to_string(n_comp.size()) + " entries for " +
                         std::to_string(fd.n_components()) + " components");
    }
    pca::MfpcaOptions opts;
    opts.method = flag_value("--method", [&] { return pca::parse_score_method(f.method); });
    opts.ufpca.covariance.smooth_diagonal = !f.raw;
    const pca::MfpcaModel model = pca::mfpca_fit(fd, n_comp, opts);

    const std::filesystem::path dir(f.out_dir);
    std::filesystem::create_directories(dir);
    RowMatrix eig(static_cast<Eigen::Index>(model.n_components()), 1);
    eig.col(0) = model.eigenvalues;
    io::write_table(dir / "eigenvalues.csv", {"eigenvalue"}, eig, true);
    for (std::size_t p = 0; p < model.bases.size(); ++p) {
        const auto argvals = pca::component_argvals(model.bases[p]);
        const RowMatrix& phi = model.eigenfunctions[p];
        const DenseFD ef(argvals, std::vector<double>(phi.data(), phi.data() + phi.size()));
        const auto path = dir / ("eigenfunctions_" + std::to_string(p) + (argvals.size() == 2 ? ".json" : ".csv"));
        write_data(UnivariateFD(ef), path);
    }
    write_matrix(model.scores, dir / "scores.csv", "score_");
    pca::save_model(model, dir / "model.json");

    const MultivariateFD rec = pca::mfpca_inverse_transform(model, pca::mfpca_transform(model, fd));
    const auto err = reconstruction_error(model, fd, rec);
    nlohmann::json retained = nlohmann::json::array();
    for (std::size_t p = 0; p < model.bases.size(); ++p) {
        retained.push_back(pca::component_functions(model.bases[p]).rows());
    }
    const nlohmann::json summary = {{"n_components", model.n_components()},
                                    {"retained_per_component", retained},
                                    {"eigenvalues", std::vector<double>(model.eigenvalues.data(),
                                                                        model.eigenvalues.data() + model.eigenvalues.size())},
                                    {"unexplained_share", err ? nlohmann::json(*err) : nlohmann::json()}};
    std::cout << summary.dump() << '\n';
}

}  // namespace

void register_fpca(CLI::App& app, Action& action) {
    auto f = std::make_shared<FpcaFlags>();
    auto* sub = app.add_subcommand("fpca", "Univariate/multivariate functional PCA");
    sub->add_option("-i,--input", f->input, "Input data (CSV, .ts, manifest; scores CSV with --inverse)")->required();
    sub->add_option("--out-dir", f->out_dir, "Directory for eigenvalues, eigenfunctions, scores and model");
    sub->add_option("--n-comp", f->n_comp, "Per-component share (< 1) or count, comma separated")
        ->capture_default_str();
    sub->add_option("--method", f->method, "Univariate scores: numint or pace")->capture_default_str();
    sub->add_flag("--raw-covariance", f->raw, "Skip the covariance diagonal correction");
    auto* tr = sub->add_option("--transform", f->transform, "Apply this model.json to the input, writing scores");
    auto* inv = sub->add_option("--inverse", f->inverse, "Rebuild curves from input scores with this model.json");
    tr->excludes(inv);
    sub->add_option("-o,--output", f->output, "Output of --transform / --inverse");
    sub->callback([f, &action] {
        action = [f] {
            if (!f->transform.empty() || !f->inverse.empty()) {
                if (f->output.empty()) throw UsageError("--transform and --inverse need --output");
                if (!f->out_dir.empty()) throw UsageError("--out-dir cannot be combined with --transform/--inverse");
            }
            if (!f->transform.empty()) {
                const auto model = pca::load_model(f->transform);
                write_matrix(pca::mfpca_transform(model, io::read_any(f->input)), f->output, "score_");
            } else if (!f->inverse.empty()) {
                const auto model = pca::load_model(f->inverse);
                write_data(pca::mfpca_inverse_transform(model, io::read_table(f->input)), f->output);
            } else {
                run_fit(*f);
            }
        };
    });
}

}  // namespace fundata::cli
