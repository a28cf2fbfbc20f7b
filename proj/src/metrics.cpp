#include "fundata/metrics.hpp"

#include <map>
#include <utility>

#include "fundata/errors.hpp"

namespace fundata {

namespace {

double choose2(double n) { return n * (n - 1.0) / 2.0; }

}  // namespace

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size()) throw ValidationError("labelings differ in length");
    std::map<std::pair<int, int>, double> joint;
    std::map<int, double> ra, rb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        joint[{a[i], b[i]}] += 1.0;
        ra[a[i]] += 1.0;
        rb[b[i]] += 1.0;
    }
    double index = 0.0, sa = 0.0, sb = 0.0;
    for (const auto& [k, v] : joint) index += choose2(v);
    for (const auto& [k, v] : ra) sa += choose2(v);
    for (const auto& [k, v] : rb) sb += choose2(v);
    const double total = choose2(static_cast<double>(a.size()));
    if (total == 0.0) return 1.0;
    const double expected = sa * sb / total;
    const double maximum = 0.5 * (sa + sb);
    if (maximum == expected) return 1.0;
    return (index - expected) / (maximum - expected);
}

}  // namespace fundata
