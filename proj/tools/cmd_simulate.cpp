#include <optional>

#include "cli_common.hpp"
#include "fundata/basis.hpp"
#include "fundata/io.hpp"
#include "fundata/simulation.hpp"

namespace fundata::cli {

namespace {

struct CommonSimFlags {
    std::size_t n_obs = 0;
    std::string grid = "0:1:101";
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string output;
    std::optional<double> noise;
    std::optional<double> sparsify;
    double epsilon = 0.05;
    std::string truth_output;
    std::string labels_output;
};

void add_common(CLI::App* sub, CommonSimFlags& f) {
    sub->add_option("--n-obs", f.n_obs, "Number of observations")->required()->check(CLI::PositiveNumber);
    sub->add_option("--grid", f.grid, "Sampling grid start:stop:count")->capture_default_str();
    sub->add_option("--seed", f.seed, "Random seed (default: FUNDATA_SEED or 0)")
        ->each([&f](const std::string&) { f.seed_set = true; });
    sub->add_option("-o,--output", f.output, "Output file (.csv, .ts or .json manifest)")->required();
    sub->add_option("--noise", f.noise, "Add homoscedastic noise with this variance");
    sub->add_option("--sparsify", f.sparsify, "Remove this share of the sampling points per curve");
    sub->add_option("--epsilon", f.epsilon, "Half-width of the sparsify share interval")->capture_default_str();
    sub->add_option("--truth-output", f.truth_output, "Also write the noiseless, complete curves here");
}

// -o receives the last stage produced: sparse, else noisy, else clean data.
void finish(sim::SimOutput& out, const CommonSimFlags& f, std::uint64_t seed) {
    if (f.noise) sim::add_noise(out, *f.noise, seed);
    if (f.sparsify) sim::sparsify(out, *f.sparsify, f.epsilon, seed);
    if (!f.truth_output.empty()) write_data(UnivariateFD(out.data), f.truth_output);
    if (out.sparse_data) {
        write_data(UnivariateFD(*out.sparse_data), f.output);
    } else if (out.noisy_data) {
        write_data(UnivariateFD(*out.noisy_data), f.output);
    } else {
        write_data(UnivariateFD(out.data), f.output);
    }
    if (!f.labels_output.empty()) {
        if (out.labels.empty()) throw UsageError("--labels-output needs a clustered simulation (--centers)");
        io::write_labels(out.labels, f.labels_output);
    }
}

}  // namespace

void register_simulate(CLI::App& app, Action& action) {
    auto* sim_cmd = app.add_subcommand("simulate", "Simulate functional data");
    sim_cmd->require_subcommand(1);

    struct KlFlags : CommonSimFlags {
        std::string basis = "wiener";
        std::size_t n_functions = 5;
        std::string decay = "exponential";
        std::string decay_values;
        std::string grid_y;
        std::string centers;
        std::string cluster_std;
        std::string mixing;
        std::string scores_output;
    };
    auto kl = std::make_shared<KlFlags>();
    auto* kl_cmd = sim_cmd->add_subcommand("kl", "Karhunen-Loeve expansion, optionally a cluster mixture");
    add_common(kl_cmd, *kl);
    kl_cmd->add_option("--basis", kl->basis, "legendre, wiener, fourier or bsplines")->capture_default_str();
    kl_cmd->add_option("--n-functions", kl->n_functions, "Number of basis functions")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    kl_cmd->add_option("--decay", kl->decay, "linear, exponential or wiener score variances")->capture_default_str();
    kl_cmd->add_option("--decay-values", kl->decay_values, "Explicit score variances a,b,c");
    kl_cmd->add_option("--grid-y", kl->grid_y, "Second grid for a 2-D tensor-product basis");
    kl_cmd->add_option("--centers", kl->centers, "Cluster mean coefficients, rows = functions: 'a,b;c,d'");
    kl_cmd->add_option("--cluster-std", kl->cluster_std,
                       "Score standard deviations per function and cluster (same layout as --centers); "
                       "default sqrt of --decay");
    kl_cmd->add_option("--mixing", kl->mixing, "Cluster probabilities (default equal)");
    kl_cmd->add_option("--labels-output", kl->labels_output, "Write cluster labels here");
    kl_cmd->add_option("--scores-output", kl->scores_output, "Write the simulated score deviations here");
    kl_cmd->callback([kl, &action] {
        action = [kl] {
            const std::uint64_t seed = kl->seed_set ? kl->seed : default_seed();
            const auto name = flag_value("--basis", [&] { return sim::parse_basis_name(kl->basis); });
            const Grid1D gx = flag_value("--grid", [&] { return parse_grid_spec(kl->grid); });
            sim::Basis basis = sim::make_basis(name, kl->n_functions, gx);
            if (!kl->grid_y.empty()) {
                basis = sim::tensor_basis_2d(basis, sim::make_basis(name, kl->n_functions,
                                                                   flag_value("--grid-y", [&] { return parse_grid_spec(kl->grid_y); })));
            }
            const std::size_t j = basis.n_functions();
            const sim::EigenDecay decay = kl->decay_values.empty()
                                              ? sim::decay_values(flag_value("--decay", [&] { return sim::parse_decay_kind(kl->decay); }), j)
                                              : sim::user_decay(parse_list(kl->decay_values, "--decay-values"));
            if (decay.values.size() != j) {
                throw UsageError("--decay-values has " + std::to_string(decay.values.size()) + " entries for " +
                                 std::to_string(j) + " basis functions");
            }
            sim::SimOutput out = [&] {
                if (kl->centers.empty()) {
                    if (!kl->cluster_std.empty() || !kl->mixing.empty()) {
                        throw UsageError("--cluster-std and --mixing need --centers");
                    }
                    return sim::simulate_kl(basis, decay, kl->n_obs, seed);
                }
                const Eigen::MatrixXd centers = parse_matrix(kl->centers, "--centers");
                sim::ClusterSpec spec = sim::ClusterSpec::with_decay(centers, decay);
                if (!kl->cluster_std.empty()) spec.cluster_std = parse_matrix(kl->cluster_std, "--cluster-std");
                if (!kl->mixing.empty()) spec.mixing = parse_list(kl->mixing, "--mixing");
                return sim::simulate_kl(basis, spec, kl->n_obs, seed);
            }();
            finish(out, *kl, seed);
            if (!kl->scores_output.empty()) write_matrix(out.scores, kl->scores_output, "xi_");
        };
    });

    struct BrownianFlags : CommonSimFlags {
        std::string kind = "standard";
        sim::BrownianParams params;
    };
    auto br = std::make_shared<BrownianFlags>();
    auto* br_cmd = sim_cmd->add_subcommand("brownian", "Standard, fractional or geometric Brownian paths");
    add_common(br_cmd, *br);
    br_cmd->add_option("--kind", br->kind, "standard, fractional or geometric")->capture_default_str();
    br_cmd->add_option("--hurst", br->params.hurst, "Hurst exponent (fractional)")->capture_default_str();
    br_cmd->add_option("--drift", br->params.drift, "Drift (geometric)")->capture_default_str();
    br_cmd->add_option("--sigma", br->params.sigma, "Volatility (geometric)")->capture_default_str();
    br_cmd->add_option("--x0", br->params.x0, "Starting value (geometric)")->capture_default_str();
    br_cmd->callback([br, &action] {
        action = [br] {
            const std::uint64_t seed = br->seed_set ? br->seed : default_seed();
            sim::SimOutput out = sim::simulate_brownian(
                flag_value("--kind", [&] { return sim::parse_brownian_kind(br->kind); }), br->n_obs,
                flag_value("--grid", [&] { return parse_grid_spec(br->grid); }), br->params, seed);
            finish(out, *br, seed);
        };
    });
}

}  // namespace fundata::cli
