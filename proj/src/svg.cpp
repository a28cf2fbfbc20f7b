#include "fundata/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include "fundata/errors.hpp"

namespace fundata::plot {

namespace {

constexpr std::array<const char*, 10> kPalette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// Roughly five round tick positions covering [lo, hi].
std::vector<double> ticks(double lo, double hi) {
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        step = m * mag;
        if (raw <= step) break;
    }
    std::vector<double> out;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) {
        out.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
    }
    return out;
}

struct Curve {
    std::vector<double> t, y;
};

}  // namespace

std::string render_svg(const UnivariateFD& fd, std::optional<std::span<const int>> labels,
                       const PlotOptions& options) {
    if (n_dim(fd) != 1) throw ValidationError("plots support 1-D data only");
    const std::size_t n = n_obs(fd);
    if (labels && labels->size() != n) {
        throw ValidationError("got " + std::to_string(labels->size()) + " labels for " + std::to_string(n) +
                              " observations");
    }
    std::vector<Curve> curves(n);
    if (const auto* d = std::get_if<DenseFD>(&fd)) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = d->observation(i);
            for (std::size_t k = 0; k < row.size(); ++k) {
                if (is_missing(row[k])) continue;
                curves[i].t.push_back(d->grid(0)[k]);
                curves[i].y.push_back(row[k]);
            }
        }
    } else {
        const auto& irr = std::get<IrregularFD>(fd);
        for (std::size_t i = 0; i < n; ++i) {
            curves[i].t = irr.obs(i).grids[0].vector();
            curves[i].y = irr.obs(i).values;
        }
    }
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& c : curves) {
        for (double v : c.t) x0 = std::min(x0, v), x1 = std::max(x1, v);
        for (double v : c.y) y0 = std::min(y0, v), y1 = std::max(y1, v);
    }
    if (x1 <= x0) x0 -= 0.5, x1 += 0.5;
    if (y1 <= y0) {
        y0 -= 1.0;
        y1 += 1.0;
    } else {
        const double pad = 0.05 * (y1 - y0);
        y0 -= pad;
        y1 += pad;
    }

    const double w = options.width, h = options.height;
    const double left = 70, right = 20, top = 40, bottom = 55;
    const double pw = w - left - right, ph = h - top - bottom;
    auto px = [&](double v) { return left + (v - x0) / (x1 - x0) * pw; };
    auto py = [&](double v) { return top + (y1 - v) / (y1 - y0) * ph; };

    std::string s;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(options.width) + "\" height=\"" +
         std::to_string(options.height) + "\" viewBox=\"0 0 " + std::to_string(options.width) + " " +
         std::to_string(options.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<g stroke=\"black\" fill=\"none\">\n";
    s += "<rect x=\"" + fmt("%.2f", left) + "\" y=\"" + fmt("%.2f", top) + "\" width=\"" + fmt("%.2f", pw) +
         "\" height=\"" + fmt("%.2f", ph) + "\"/>\n";
    for (double t : ticks(x0, x1)) {
        s += "<line x1=\"" + fmt("%.2f", px(t)) + "\" y1=\"" + fmt("%.2f", top + ph) + "\" x2=\"" + fmt("%.2f", px(t)) +
             "\" y2=\"" + fmt("%.2f", top + ph + 5) + "\"/>\n";
    }
    for (double t : ticks(y0, y1)) {
        s += "<line x1=\"" + fmt("%.2f", left - 5) + "\" y1=\"" + fmt("%.2f", py(t)) + "\" x2=\"" + fmt("%.2f", left) +
             "\" y2=\"" + fmt("%.2f", py(t)) + "\"/>\n";
    }
    s += "</g>\n<g fill=\"black\">\n";
    for (double t : ticks(x0, x1)) {
        s += "<text x=\"" + fmt("%.2f", px(t)) + "\" y=\"" + fmt("%.2f", top + ph + 18) +
             "\" text-anchor=\"middle\">" + fmt("%g", t) + "</text>\n";
    }
    for (double t : ticks(y0, y1)) {
        s += "<text x=\"" + fmt("%.2f", left - 8) + "\" y=\"" + fmt("%.2f", py(t) + 4) + "\" text-anchor=\"end\">" +
             fmt("%g", t) + "</text>\n";
    }
    if (!options.title.empty()) {
        s += "<text x=\"" + fmt("%.2f", w / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" +
             escape(options.title) + "</text>\n";
    }
    if (!options.xlabel.empty()) {
        s += "<text x=\"" + fmt("%.2f", left + pw / 2) + "\" y=\"" + fmt("%.2f", h - 12) +
             "\" text-anchor=\"middle\">" + escape(options.xlabel) + "</text>\n";
    }
    if (!options.ylabel.empty()) {
        s += "<text x=\"18\" y=\"" + fmt("%.2f", top + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
             fmt("%.2f", top + ph / 2) + ")\">" + escape(options.ylabel) + "</text>\n";
    }
    s += "</g>\n<g fill=\"none\" stroke-width=\"1.2\">\n";
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t colour = labels ? static_cast<std::size_t>(std::max(0, (*labels)[i])) : i;
        s += "<polyline stroke=\"" + std::string(kPalette[colour % kPalette.size()]) + "\" points=\"";
        for (std::size_t k = 0; k < curves[i].t.size(); ++k) {
            if (k) s += ' ';
            s += fmt("%.2f", px(curves[i].t[k])) + "," + fmt("%.2f", py(curves[i].y[k]));
        }
        s += "\"/>\n";
    }
    s += "</g>\n</svg>\n";
    return s;
}

}  // namespace fundata::plot
