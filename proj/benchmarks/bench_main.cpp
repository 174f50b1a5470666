// Microbenchmarks for the hot paths: potential solves, hydro steps, particle
// force sums, and deposition. Run ./ksfluid_bench --benchmark_filter=... to
// narrow down.
#include <benchmark/benchmark.h>

#include "ksfluid/functionals.hpp"
#include "ksfluid/hydro.hpp"
#include "ksfluid/particles.hpp"
#include "ksfluid/poisson.hpp"
#include "ksfluid/state.hpp"

#include <numbers>

using namespace ksfluid;

namespace {
FluidState bench_state(int n) {
    GaussianSpec spec;
    spec.mass = 4.0 * std::numbers::pi;
    spec.bulk_velocity = {0.1, -0.05};
    ModelParams par = ModelParams::scaled(spec.mass, 8.0);
    return gaussian_state(make_grid(8.0, n), spec, par);
}

ParticleEnsemble bench_ensemble(std::size_t n) {
    GaussianSpec spec;
    spec.mass = 4.0 * std::numbers::pi;
    ParticleEnsemble e = sample_gaussian_ensemble(spec, n, 99, 1e-3);
    e.relax_time = 1.0;
    return e;
}
}  // namespace

static void BM_PoissonFFT(benchmark::State& state) {
    FluidState s = bench_state(static_cast<int>(state.range(0)));
    PoissonSolver solver(s.grid());  // plans cached, as in the run loop
    for (auto _ : state) {
        PoissonSolution sol = solver.solve(s.rho);
        benchmark::DoNotOptimize(sol.phi.values.data());
    }
}
BENCHMARK(BM_PoissonFFT)->Arg(64)->Arg(128)->Arg(256);

static void BM_PoissonDirect(benchmark::State& state) {
    FluidState s = bench_state(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        PoissonSolution sol = solve_direct(s.rho);
        benchmark::DoNotOptimize(sol.phi.values.data());
    }
}
BENCHMARK(BM_PoissonDirect)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_HydroStep(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    FluidState s = bench_state(n);
    ModelParams par = ModelParams::scaled(4.0 * std::numbers::pi, 8.0);
    PoissonSolver solver(s.grid());
    double dt = cfl_dt(s, par);
    for (auto _ : state) {
        StepResult r = step(s, solver, par, dt);
        benchmark::DoNotOptimize(r.state.rho.values.data());
    }
}
BENCHMARK(BM_HydroStep)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_Diagnostics(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    FluidState s = bench_state(n);
    ModelParams par = ModelParams::scaled(4.0 * std::numbers::pi, 8.0);
    PoissonSolver solver(s.grid());
    PoissonSolution sol = solver.solve(s.rho);
    for (auto _ : state) {
        DiagnosticsRecord r = diagnostics(s, sol, par, 0.0, 0.0);
        benchmark::DoNotOptimize(&r);
    }
}
BENCHMARK(BM_Diagnostics)->Arg(128)->Arg(256);

static void BM_ParticleForces(benchmark::State& state) {
    ParticleEnsemble e = bench_ensemble(static_cast<std::size_t>(state.range(0)));
    std::vector<double> fx, fy;
    for (auto _ : state) {
        mean_field_forces(e, fx, fy);
        benchmark::DoNotOptimize(fx.data());
    }
}
BENCHMARK(BM_ParticleForces)->Arg(1000)->Arg(4000)->Arg(16000)->Unit(benchmark::kMillisecond);

static void BM_EnsembleStep(benchmark::State& state) {
    ParticleEnsemble e = bench_ensemble(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        e = ensemble_step(e, 0.01);
        benchmark::DoNotOptimize(e.x.data());
    }
}
BENCHMARK(BM_EnsembleStep)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

static void BM_Deposit(benchmark::State& state) {
    ParticleEnsemble e = bench_ensemble(16000);
    GridSpec g = make_grid(8.0, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        ScalarField rho = deposit_density(e, g);
        benchmark::DoNotOptimize(rho.values.data());
    }
}
BENCHMARK(BM_Deposit)->Arg(64)->Arg(128)->Arg(256);

BENCHMARK_MAIN();
