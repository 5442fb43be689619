#include <benchmark/benchmark.h>

#include <random>

#include "vbl/evolution.hpp"
#include "vbl/model.hpp"
#include "vbl/profile.hpp"
#include "vbl/quadrature.hpp"
#include "vbl/spectrum.hpp"

namespace {

const vbl::Model& bf() {
    static const vbl::Model m = vbl::Model::builtin("burgers-fisher");
    return m;
}

const vbl::WaveProfile& hopf_wave() {
    static const vbl::WaveProfile w = [] {
        return std::move(vbl::continue_hopf_family(bf(), {0.01}).front());
    }();
    return w;
}

void BM_MelnikovSpeed(benchmark::State& state) {
    const vbl::Model m = vbl::Model::builtin("logistic-buckley-leverett");
    for (auto _ : state) benchmark::DoNotOptimize(m.melnikov_speed());
}
BENCHMARK(BM_MelnikovSpeed);

void BM_HillAssembleAndSolve(benchmark::State& state) {
    const vbl::BlochCoefficients coeffs = vbl::bloch_coefficients(bf(), hopf_wave());
    for (auto _ : state) {
        benchmark::DoNotOptimize(vbl::bloch_eigenvalues(coeffs, 0.7));
    }
}
BENCHMARK(BM_HillAssembleAndSolve);

void BM_EtdStep(benchmark::State& state) {
    const vbl::WaveProfile& w = hopf_wave();
    vbl::SpectralState s = vbl::SpectralState::from_physical(w.phi, w.L);
    const double dt = w.L * w.L / (4.0 * w.grid_size() * w.grid_size());
    for (auto _ : state) {
        s = vbl::step_etd(bf(), s, w.c, dt);
        benchmark::DoNotOptimize(s.u_hat.data());
    }
}
BENCHMARK(BM_EtdStep);

void BM_OrbitalDistance(benchmark::State& state) {
    const vbl::WaveProfile& w = hopf_wave();
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> jitter(-1e-3, 1e-3);
    std::vector<double> u = w.phi;
    for (double& v : u) v += jitter(rng);
    for (auto _ : state) benchmark::DoNotOptimize(vbl::orbital_distance(u, w));
}
BENCHMARK(BM_OrbitalDistance);

void BM_Quadrature(benchmark::State& state) {
    for (auto _ : state) {
        auto r = vbl::integrate([](double x) { return std::sin(10.0 * x) / (1.0 + x * x); },
                                0.0, 3.0, 1e-12, 1e-14);
        benchmark::DoNotOptimize(r.value);
    }
}
BENCHMARK(BM_Quadrature);

}  // namespace

BENCHMARK_MAIN();
