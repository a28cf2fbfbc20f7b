#pragma once

#include <span>

namespace fundata {

/// Adjusted Rand index of two labelings of the same items.
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

}  // namespace fundata
