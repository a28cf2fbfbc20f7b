#include "cli_common.hpp"
#include "fundata/io.hpp"
#include "fundata/svg.hpp"

namespace fundata::cli {

namespace {

struct PlotFlags {
    std::string input;
    std::string output;
    std::string labels;
    plot::PlotOptions options;
};

}  // namespace

void register_plot(CLI::App& app, Action& action) {
    auto f = std::make_shared<PlotFlags>();
    auto* sub = app.add_subcommand("plot", "Render curves as a static SVG");
    sub->add_option("-i,--input", f->input, "Input curves (CSV, .ts or manifest)")->required();
    sub->add_option("-o,--output", f->output, "SVG file")->required();
    sub->add_option("--labels", f->labels, "Labels CSV used for colouring");
    sub->add_option("--title", f->options.title, "Plot title");
    sub->add_option("--xlabel", f->options.xlabel, "x axis label");
    sub->add_option("--ylabel", f->options.ylabel, "y axis label");
    sub->add_option("--width", f->options.width, "Width in pixels")->capture_default_str()->check(CLI::Range(100, 10000));
    sub->add_option("--height", f->options.height, "Height in pixels")
        ->capture_default_str()
        ->check(CLI::Range(100, 10000));
    sub->callback([f, &action] {
        action = [f] {
            const UnivariateFD fd = read_univariate(f->input);
            std::optional<std::span<const int>> labels;
            std::vector<int> stored;
            if (!f->labels.empty()) {
                stored = io::read_labels(f->labels);
                labels = std::span<const int>(stored);
            }
            io::write_file_atomic(f->output, plot::render_svg(fd, labels, f->options));
        };
    });
}

}  // namespace fundata::cli
