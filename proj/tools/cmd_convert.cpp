#include <algorithm>
#include <charconv>
#include <map>

#include "cli_common.hpp"
#include "fundata/io.hpp"

namespace fundata::cli {

namespace {

struct ConvertFlags {
    std::string input;
    std::string output;
    std::string to;
    std::string labels;
    std::string labels_output;
};

// Integer class names keep their value; other names are numbered in sorted order.
std::vector<int> label_codes(const std::vector<std::string>& names) {
    std::vector<int> out;
    bool numeric = true;
    for (const auto& s : names) {
        int v = 0;
        const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || end != s.data() + s.size()) {
            numeric = false;
            break;
        }
        out.push_back(v);
    }
    if (numeric) return out;
    std::map<std::string, int> codes;
    for (const auto& s : names) codes.emplace(s, 0);
    int next = 0;
    for (auto& [name, code] : codes) code = next++;
    out.clear();
    for (const auto& s : names) out.push_back(codes.at(s));
    return out;
}

UnivariateFD convert_component(const UnivariateFD& fd, const std::string& to) {
    if (to.empty()) return fd;
    if (to == "dense") {
        if (const auto* irr = std::get_if<IrregularFD>(&fd)) return to_dense(*irr);
        return fd;
    }
    if (const auto* d = std::get_if<DenseFD>(&fd)) return to_irregular(*d);
    return fd;
}

void run(const ConvertFlags& f) {
    if (!f.to.empty() && f.to != "dense" && f.to != "irregular") {
        throw UsageError("--to: expected 'dense' or 'irregular', got '" + f.to + "'");
    }
    std::vector<UnivariateFD> parts;
    std::optional<std::vector<std::string>> ts_labels;
    if (std::filesystem::path(f.input).extension() == ".ts") {
        io::TsData ts = io::read_ts(f.input);
        ts_labels = std::move(ts.labels);
        parts.emplace_back(std::move(ts.data));
    } else {
        const MultivariateFD fd = io::read_any(f.input);
        parts.assign(fd.begin(), fd.end());
    }
    for (auto& p : parts) p = convert_component(p, f.to);
    const MultivariateFD out(std::move(parts));

    if (!f.labels_output.empty()) {
        if (!ts_labels) throw UsageError("--labels-output needs a .ts input with class labels");
        io::write_labels(label_codes(*ts_labels), f.labels_output);
    }
    if (std::filesystem::path(f.output).extension() == ".ts") {
        if (out.n_components() != 1) throw UsageError(".ts output holds a single component");
        std::optional<std::vector<std::string>> names = ts_labels;
        if (!f.labels.empty()) {
            names.emplace();
            for (int v : io::read_labels(f.labels)) names->push_back(std::to_string(v));
        }
        const auto* d = std::get_if<DenseFD>(&out[0]);
        io::write_ts(d ? *d : to_dense(std::get<IrregularFD>(out[0])), names, f.output);
        return;
    }
    if (!f.labels.empty()) throw UsageError("--labels only applies to .ts output");
    write_data(out, f.output);
}

}  // namespace

void register_convert(CLI::App& app, Action& action) {
    auto f = std::make_shared<ConvertFlags>();
    auto* sub = app.add_subcommand("convert", "Convert between CSV, .ts and manifest files");
    sub->add_option("-i,--input", f->input, "Input data (CSV, .ts or manifest)")->required();
    sub->add_option("-o,--output", f->output, "Output data; the format follows the extension")->required();
    sub->add_option("--to", f->to, "Representation of every component: dense or irregular");
    sub->add_option("--labels", f->labels, "Labels CSV stored as class values of a .ts output");
    sub->add_option("--labels-output", f->labels_output, "Write the class values of a .ts input as a labels CSV");
    sub->callback([f, &action] { action = [f] { run(*f); }; });
}

}  // namespace fundata::cli
