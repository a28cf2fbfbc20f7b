#include <cmath>
#include <optional>

#include "cli_common.hpp"
#include "fundata/local_poly.hpp"

namespace fundata::cli {

namespace {

struct SmoothFlags {
    std::string input;
    std::string output;
    int degree = 1;
    std::string kernel = "epanechnikov";
    std::string method = "knn";
    std::optional<double> bandwidth;
    std::size_t neighborhood = 2;
    std::optional<double> anchor;
    std::string grid;
};

}  // namespace

void register_smooth(CLI::App& app, Action& action) {
    auto f = std::make_shared<SmoothFlags>();
    auto* sub = app.add_subcommand("smooth", "Local polynomial smoothing of every curve");
    sub->add_option("-i,--input", f->input, "Input curves (CSV, .ts or manifest)")->required();
    sub->add_option("-o,--output", f->output, "Smoothed curves")->required();
    sub->add_option("--degree", f->degree, "Local polynomial degree")->capture_default_str()->check(CLI::NonNegativeNumber);
    sub->add_option("--kernel", f->kernel, "gaussian, epanechnikov, tricube or bisquare")->capture_default_str();
    sub->add_option("--bandwidth-method", f->method, "knn, cv or fixed")->capture_default_str();
    sub->add_option("--bandwidth", f->bandwidth, "Fixed bandwidth (implies --bandwidth-method fixed)");
    sub->add_option("--neighborhood", f->neighborhood, "knn: neighbours on each side of the anchor")
        ->capture_default_str();
    sub->add_option("--anchor", f->anchor, "knn: anchor point (default: middle of the range)");
    sub->add_option("--grid", f->grid, "Output grid start:stop:count (default: input grid)");
    sub->callback([f, &action] {
        action = [f] {
            smooth::SmoothSpec spec;
            spec.degree = f->degree;
            spec.kernel = flag_value("--kernel", [&] { return smooth::parse_kernel(f->kernel); });
            spec.bandwidth.method =
                flag_value("--bandwidth-method", [&] { return smooth::parse_bandwidth_method(f->method); });
            if (f->bandwidth) {
                if (!(*f->bandwidth > 0.0)) throw UsageError("--bandwidth must be positive");
                spec.bandwidth.method = smooth::BandwidthMethod::fixed;
                spec.bandwidth.value = *f->bandwidth;
            } else if (spec.bandwidth.method == smooth::BandwidthMethod::fixed) {
                throw UsageError("--bandwidth-method fixed needs --bandwidth");
            }
            spec.bandwidth.neighborhood = f->neighborhood;
            if (f->anchor) spec.bandwidth.anchor = *f->anchor;
            std::optional<Grid1D> grid;
            if (!f->grid.empty()) grid = flag_value("--grid", [&] { return parse_grid_spec(f->grid); });
            const UnivariateFD fd = read_univariate(f->input);
            write_data(UnivariateFD(smooth::smooth_fd(fd, spec, grid)), f->output);
        };
    });
}

}  // namespace fundata::cli
