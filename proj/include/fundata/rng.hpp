#pragma once

#include <cstdint>
#include <random>

namespace fundata {

/// Random stream used by every generator in the library.
///
/// Engine: std::mt19937_64 (bit-exact across standard libraries), seeded with
/// splitmix64(seed ^ splitmix64(stream)). Uniforms take the top 53 bits;
/// normals use the Marsaglia polar method; bounded integers use rejection
/// sampling. None of the implementation-defined std distributions are used,
/// so identical (seed, stream) pairs give identical draws on every platform.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream = 0);

    /// Uniform on [0, 1).
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal();
    double normal(double mean, double sd) { return mean + sd * normal(); }
    /// Uniform integer in [0, n); n > 0.
    std::uint64_t below(std::uint64_t n);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Stream ids shared by the simulation toolbox.
namespace streams {
inline constexpr std::uint64_t scores = 1;
inline constexpr std::uint64_t labels = 2;
inline constexpr std::uint64_t noise = 3;
inline constexpr std::uint64_t sparsify = 4;
inline constexpr std::uint64_t paths = 5;
}  // namespace streams

}  // namespace fundata
