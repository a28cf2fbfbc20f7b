#pragma once

#include <string>
#include <string_view>

namespace fundata::smooth {

enum class Kernel { gaussian, epanechnikov, tricube, bisquare };

Kernel parse_kernel(std::string_view name);
std::string to_string(Kernel kernel);

/// True for kernels vanishing outside [-1, 1].
bool compact_support(Kernel kernel);

/// Density value K(u).
double kernel_eval(Kernel kernel, double u);

}  // namespace fundata::smooth
