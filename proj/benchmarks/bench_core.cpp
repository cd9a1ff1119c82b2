#include <benchmark/benchmark.h>

#include <voltlift/kernels.hpp>
#include <voltlift/laplace_lift.hpp>
#include <voltlift/resolvent.hpp>
#include <voltlift/sim.hpp>
#include <voltlift/special.hpp>
#include <voltlift/stats.hpp>

#include <cmath>
#include <random>

namespace vl = voltlift;

namespace {

vl::special::WeightParams wp_lap() {
    vl::special::WeightParams w;
    w.family = vl::special::WeightFamily::laplace;
    w.delta = 0.5;
    w.eta = 2.0;
    return w;
}

void BM_MittagLefflerSeries(benchmark::State& state) {
    double z = -1.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(vl::special::mittag_leffler({0.75, 0.75}, z));
        z = z > -5.0 ? z - 0.01 : -1.0;
    }
}
BENCHMARK(BM_MittagLefflerSeries);

void BM_MittagLefflerMidZone(benchmark::State& state) {
    double z = -10.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(vl::special::mittag_leffler({0.75, 0.75}, z));
        z = z > -24.0 ? z - 0.05 : -10.0;
    }
}
BENCHMARK(BM_MittagLefflerMidZone);

void BM_KernelReconstruction(benchmark::State& state) {
    const auto q = vl::laplace_lift::build_quadrature(wp_lap(), 1e-4, 1e4, state.range(0));
    const auto k = vl::kernels::KernelSpec::resolvent_fractional(0.7, 0.7, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(vl::laplace_lift::reconstruct_kernel(k, q, 1.0));
}
BENCHMARK(BM_KernelReconstruction)->Arg(50)->Arg(200);

void BM_ResolventSolve(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto rho = vl::resolvent::SampledKernel::from_function(
        [](double t) { return 0.5 * std::exp(-t); }, 20.0 / n, n);
    for (auto _ : state) benchmark::DoNotOptimize(vl::resolvent::solve_resolvent(rho));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ResolventSolve)->Arg(1024)->Arg(4096)->Complexity(benchmark::oNSquared);

void BM_LaplaceLiftStep(benchmark::State& state) {
    vl::sim::ModelSpec m;
    m.spectral.thetas = {1.0};
    m.spectral.noise_eigs = {1.0};
    m.kernel_b = vl::kernels::KernelSpec::resolvent_fractional(0.75, 0.75, 1.0);
    m.kernel_sigma = m.kernel_b;
    m.diffusion.s0 = {1.0};
    vl::sim::SimConfig c;
    c.dt = 1e-3;
    c.T = 1.0;
    c.scheme = vl::sim::Scheme::laplace_lift;
    const auto q = vl::laplace_lift::build_quadrature(wp_lap(), 1e-4, 1e4, 200);
    vl::sim::LaplaceLiftSimulator sim(m, q, c);
    for (auto _ : state)
        sim.run_path(1, [](std::size_t, const std::vector<double>&) {});
    state.SetItemsProcessed(state.iterations() * c.steps());
}
BENCHMARK(BM_LaplaceLiftStep);

void BM_Wasserstein1d(benchmark::State& state) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    std::vector<double> a(100000), b(100000);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = g(rng);
        b[i] = g(rng) + 0.1;
    }
    for (auto _ : state) benchmark::DoNotOptimize(vl::stats::wasserstein_1d(a, b, 1.0));
}
BENCHMARK(BM_Wasserstein1d);

}  // namespace

BENCHMARK_MAIN();
