#include "mpx/fixtures.hpp"
#include "mpx/sim.hpp"
#include "mpx/spectral.hpp"
#include "mpx/stability.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

mpx::LayerGraph random_graph(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> w(0.5, 2.0);
    std::vector<mpx::Edge> edges;
    for (std::size_t i = 1; i < n; ++i) {
        edges.push_back({i - 1, i, w(gen)});
    }
    for (std::size_t i = 0; i + 2 < n; ++i) {
        for (std::size_t j = i + 2; j < n; ++j) {
            if (gen() % 8 == 0) {
                edges.push_back({i, j, w(gen)});
            }
        }
    }
    return mpx::LayerGraph(n, std::move(edges));
}

void BM_BlockDecompose(benchmark::State& state) {
    const auto L = mpx::laplacian(random_graph(static_cast<std::size_t>(state.range(0)), 1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(mpx::block_decompose(L));
    }
}
BENCHMARK(BM_BlockDecompose)->Arg(10)->Arg(50)->Arg(100);

void BM_CheckTheorem(benchmark::State& state) {
    const auto sys = mpx::fixtures::heterogeneous_eight();
    for (auto _ : state) {
        benchmark::DoNotOptimize(mpx::check_theorem(sys));
    }
}
BENCHMARK(BM_CheckTheorem);

void BM_ErrorSystemAbscissa(benchmark::State& state) {
    const auto sys = mpx::fixtures::heterogeneous_eight();
    const mpx::ErrorSystemFactory factory(sys);
    for (auto _ : state) {
        benchmark::DoNotOptimize(factory.at(19.3, 15.0).abscissa());
    }
}
BENCHMARK(BM_ErrorSystemAbscissa);

void BM_Simulate(benchmark::State& state) {
    const auto sys = mpx::fixtures::heterogeneous_eight();
    const mpx::Vector x0 = mpx::Vector::LinSpaced(16, -10.0, 10.0);
    const mpx::SimOptions opts{.t_end = 10.0, .dt = 1e-3, .record_every = 1000};
    for (auto _ : state) {
        benchmark::DoNotOptimize(mpx::simulate(sys, x0, opts));
    }
}
BENCHMARK(BM_Simulate)->Unit(benchmark::kMillisecond);

void BM_Sweep(benchmark::State& state) {
    const auto sys = mpx::fixtures::heterogeneous_eight();
    const auto grid = mpx::cell_centres(0.0, 40.0, 10);
    for (auto _ : state) {
        benchmark::DoNotOptimize(mpx::sweep(sys, grid, grid, static_cast<unsigned>(state.range(0))));
    }
}
BENCHMARK(BM_Sweep)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
