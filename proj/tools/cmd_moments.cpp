#include <iostream>
#include <optional>

#include <json.hpp>

#include "cli_common.hpp"
#include "fundata/io.hpp"
#include "fundata/moments.hpp"

namespace fundata::cli {

namespace {

struct MomentsFlags {
    std::string input;
    std::string mean_output;
    std::string cov_output;
    bool raw = false;
    std::optional<double> bandwidth;
};

}  // namespace

void register_moments(CLI::App& app, Action& action) {
    auto f = std::make_shared<MomentsFlags>();
    auto* sub = app.add_subcommand("moments", "Mean and covariance functions");
    sub->add_option("-i,--input", f->input, "Input curves")->required();
    sub->add_option("--mean-output", f->mean_output, "Mean curve CSV");
    sub->add_option("--cov-output", f->cov_output, "Covariance surface CSV (rows s, columns t)");
    sub->add_flag("--raw-covariance", f->raw, "Skip the diagonal correction");
    sub->add_option("--bandwidth", f->bandwidth, "Bandwidth of the covariance smoother (default: CV)");
    sub->callback([f, &action] {
        action = [f] {
            if (f->mean_output.empty() && f->cov_output.empty()) {
                throw UsageError("give --mean-output and/or --cov-output");
            }
            const UnivariateFD fd = read_univariate(f->input);
            nlohmann::json summary = {{"n_obs", n_obs(fd)}};
            if (!f->mean_output.empty()) write_data(UnivariateFD(moments::estimate_mean(fd)), f->mean_output);
            if (!f->cov_output.empty()) {
                moments::CovarianceOptions opts;
                opts.smooth_diagonal = !f->raw;
                opts.bandwidth = f->bandwidth;
                const auto cov = moments::estimate_covariance(fd, opts);
                std::vector<std::string> header;
                for (double t : cov.grid_t.points()) header.push_back(io::format_double(t));
                io::write_table(f->cov_output, header, cov.values, true);
                summary["diagonal_corrected"] = cov.diagonal_corrected;
                summary["noise_variance"] = cov.noise_variance ? nlohmann::json(*cov.noise_variance) : nlohmann::json();
                summary["bandwidth"] = cov.bandwidth ? nlohmann::json(*cov.bandwidth) : nlohmann::json();
            }
            std::cout << summary.dump() << '\n';
        };
    });
}

}  // namespace fundata::cli
