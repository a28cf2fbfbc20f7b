#pragma once

#include <optional>
#include <span>
#include <string>

#include "fundata/functional_data.hpp"

namespace fundata::plot {

struct PlotOptions {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    int width = 800;
    int height = 500;
};

/// Static SVG of 1-D curves: one polyline per observation (observed points
/// only), coloured by label when labels are given, by observation otherwise.
std::string render_svg(const UnivariateFD& fd, std::optional<std::span<const int>> labels,
                       const PlotOptions& options = {});

}  // namespace fundata::plot
