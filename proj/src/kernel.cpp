#include "fundata/kernel.hpp"

#include <cmath>
#include <numbers>

#include "fundata/errors.hpp"

namespace fundata::smooth {

Kernel parse_kernel(std::string_view name) {
    if (name == "gaussian") return Kernel::gaussian;
    if (name == "epanechnikov") return Kernel::epanechnikov;
    if (name == "tricube") return Kernel::tricube;
    if (name == "bisquare") return Kernel::bisquare;
    throw ValidationError("unknown kernel '" + std::string(name) + "'");
}

std::string to_string(Kernel kernel) {
    switch (kernel) {
        case Kernel::gaussian: return "gaussian";
        case Kernel::epanechnikov: return "epanechnikov";
        case Kernel::tricube: return "tricube";
        case Kernel::bisquare: return "bisquare";
    }
    return "unknown";
}

bool compact_support(Kernel kernel) { return kernel != Kernel::gaussian; }

double kernel_eval(Kernel kernel, double u) {
    const double a = std::abs(u);
    switch (kernel) {
        case Kernel::gaussian:
            return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
        case Kernel::epanechnikov:
            return a < 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
        case Kernel::tricube: {
            if (a >= 1.0) return 0.0;
            const double c = 1.0 - a * a * a;
            return 70.0 / 81.0 * c * c * c;
        }
        case Kernel::bisquare: {
            if (a >= 1.0) return 0.0;
            const double c = 1.0 - u * u;
            return 15.0 / 16.0 * c * c;
        }
    }
    return 0.0;
}

}  // namespace fundata::smooth
