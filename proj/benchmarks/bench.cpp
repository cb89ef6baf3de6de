// Microbenchmarks for the numerical kernels that dominate end-to-end runs:
// the discrete half-line transform pair, the banded Helmholtz factorization,
// the modal Green's convolution, and the Hermitian eigensolver.
#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "wgt/conditioning.hpp"
#include "wgt/defects.hpp"
#include "wgt/fdfd.hpp"
#include "wgt/forward.hpp"
#include "wgt/inversion.hpp"

namespace {

wgt::GammaOperatorSpec make_spec(int n_x, int n_omega) {
    wgt::GammaOperatorSpec spec;
    spec.x0 = 0.5;
    spec.h = 1.0 / (n_x - 1);
    spec.N_X = n_x;
    spec.omega.resize(static_cast<std::size_t>(n_omega));
    for (int i = 0; i < n_omega; ++i)
        spec.omega[static_cast<std::size_t>(i)] = 0.5 + 0.05 * i;
    return spec;
}

void bm_gamma_apply(benchmark::State& state) {
    const int n_x = static_cast<int>(state.range(0));
    const auto spec = make_spec(n_x, 2 * n_x);
    std::vector<wgt::cdouble> y(static_cast<std::size_t>(n_x));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& v : y) v = {u(rng), u(rng)};
    for (auto _ : state) benchmark::DoNotOptimize(wgt::gamma_apply(y, spec));
}
BENCHMARK(bm_gamma_apply)->Arg(251)->Arg(501)->Arg(1001);

void bm_gamma_adjoint(benchmark::State& state) {
    const int n_x = static_cast<int>(state.range(0));
    const auto spec = make_spec(n_x, 2 * n_x);
    std::vector<wgt::cdouble> d(spec.omega.size());
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& v : d) v = {u(rng), u(rng)};
    for (auto _ : state) benchmark::DoNotOptimize(wgt::gamma_adjoint(d, spec));
}
BENCHMARK(bm_gamma_adjoint)->Arg(251)->Arg(501)->Arg(1001);

void bm_banded_scattering_solve(benchmark::State& state) {
    const double k = static_cast<double>(state.range(0));
    wgt::BendParams bend{2.0, 5.0, 3.14159265358979323846 / 6.0};
    wgt::DefectDescriptor defect{bend};
    wgt::DiscretizationConfig cfg;
    cfg.dx = 0.02;
    cfg.dy = 0.02;
    cfg.x_min = 1.0;
    cfg.x_max = 6.0;
    cfg.closure = wgt::BoundaryClosure::modal;
    cfg.auto_refine_dx = false;
    for (auto _ : state) {
        auto sys = wgt::assemble_scattering(defect, k, cfg);
        benchmark::DoNotOptimize(wgt::solve(sys));
    }
}
BENCHMARK(bm_banded_scattering_solve)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

void bm_green_convolve(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    wgt::LineFunction s = wgt::make_line(0.0, 4.0 / (n - 1), n);
    for (int i = 0; i < n; ++i) {
        const double x = s.x(i);
        s.samples[static_cast<std::size_t>(i)] = std::exp(-(x - 2.0) * (x - 2.0));
    }
    const auto kn = wgt::longitudinal_wavenumber(10.0, 1);
    for (auto _ : state)
        benchmark::DoNotOptimize(wgt::green_convolve(s, kn, -1.0, 4.0 / (n - 1), n));
}
BENCHMARK(bm_green_convolve)->Arg(201)->Arg(401)->Unit(benchmark::kMicrosecond);

void bm_hermitian_eigenvalues(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::vector<wgt::cdouble> a(static_cast<std::size_t>(n) * n);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            const wgt::cdouble v = i == j ? wgt::cdouble(u(rng), 0.0)
                                          : wgt::cdouble(u(rng), u(rng));
            a[static_cast<std::size_t>(i) * n + j] = v;
            a[static_cast<std::size_t>(j) * n + i] = std::conj(v);
        }
    for (auto _ : state) {
        auto copy = a;
        benchmark::DoNotOptimize(wgt::hermitian_eigenvalues(std::move(copy), n));
    }
}
BENCHMARK(bm_hermitian_eigenvalues)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
