// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include "fundata/basis.hpp"
#include "fundata/parallel.hpp"
#include "fundata/simulation.hpp"

namespace {

using namespace fundata;

struct Fixture {
    sim::SimOutput data;
    std::vector<kernels::CurveTask> tasks;
    Eigen::VectorXd mean;
    RowMatrix functions;

    Fixture(std::size_t n, std::size_t m) : data(make(n, m)) {
        const auto& fd = data.data;
        for (std::size_t i = 0; i < n; ++i) {
            tasks.push_back({fd.grid(0).points(), fd.observation(i), 0.05});
        }
        mean = fd.matrix().colwise().mean().transpose();
        functions = data.basis->functions;
    }

    static sim::SimOutput make(std::size_t n, std::size_t m) {
        const auto basis = sim::make_basis(sim::BasisName::wiener, 5, Grid1D::linspace(0.0, 1.0, m));
        return sim::simulate_kl(basis, sim::decay_values(sim::DecayKind::exponential, 5), n, 1);
    }
};

const Fixture& fixture() {
    static const Fixture f(500, 101);
    return f;
}

template <bool Parallel>
void BM_LocalPolyBatch(benchmark::State& state) {
    const auto& f = fixture();
    RowMatrix out;
    for (auto _ : state) {
        if constexpr (Parallel) {
            kernels::omp::local_poly_batch(f.tasks, f.data.data.grid(0).points(), 1, smooth::Kernel::epanechnikov, out);
        } else {
            kernels::serial::local_poly_batch(f.tasks, f.data.data.grid(0).points(), 1, smooth::Kernel::epanechnikov,
                                              out);
        }
        benchmark::DoNotOptimize(out.data());
    }
}

template <bool Parallel>
void BM_CrossProducts(benchmark::State& state) {
    const auto& f = fixture();
    const RowMatrix x = f.data.data.matrix();
    RowMatrix sums, counts;
    for (auto _ : state) {
        if constexpr (Parallel) {
            kernels::omp::cross_products(x, f.mean, x, f.mean, true, sums, counts);
        } else {
            kernels::serial::cross_products(x, f.mean, x, f.mean, true, sums, counts);
        }
        benchmark::DoNotOptimize(sums.data());
    }
}

template <bool Parallel>
void BM_LocalLinear2d(benchmark::State& state) {
    const Grid1D grid = Grid1D::linspace(0.0, 1.0, 51);
    kernels::Scatter2D data;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t j = 0; j < grid.size(); ++j) {
            if (i == j) continue;
            data.s.push_back(grid[i]);
            data.t.push_back(grid[j]);
            data.z.push_back(std::sin(grid[i]) * std::cos(grid[j]));
            data.w.push_back(1.0);
        }
    }
    std::vector<kernels::Point2D> points;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t j = 0; j < grid.size(); ++j) points.push_back({grid[i], grid[j]});
    }
    std::vector<double> out;
    for (auto _ : state) {
        if constexpr (Parallel) {
            kernels::omp::local_linear_2d(data, points, 0.1, smooth::Kernel::epanechnikov, out);
        } else {
            kernels::serial::local_linear_2d(data, points, 0.1, smooth::Kernel::epanechnikov, out);
        }
        benchmark::DoNotOptimize(out.data());
    }
}

template <bool Parallel>
void BM_TrapezoidScores(benchmark::State& state) {
    const auto& f = fixture();
    const RowMatrix x = f.data.data.matrix();
    RowMatrix out;
    for (auto _ : state) {
        if constexpr (Parallel) {
            kernels::omp::trapezoid_scores(x, f.mean, f.functions, f.data.data.grid(0), out);
        } else {
            kernels::serial::trapezoid_scores(x, f.mean, f.functions, f.data.data.grid(0), out);
        }
        benchmark::DoNotOptimize(out.data());
    }
}

}  // namespace

BENCHMARK(BM_LocalPolyBatch<false>)->Name("local_poly_batch/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LocalPolyBatch<true>)->Name("local_poly_batch/omp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CrossProducts<false>)->Name("cross_products/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CrossProducts<true>)->Name("cross_products/omp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LocalLinear2d<false>)->Name("local_linear_2d/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LocalLinear2d<true>)->Name("local_linear_2d/omp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrapezoidScores<false>)->Name("trapezoid_scores/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrapezoidScores<true>)->Name("trapezoid_scores/omp")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
