// Micro-benchmarks for the hot paths: implicit-step assembly and solve,
// exact-coefficient construction, moment-objective evaluation, and path
// simulation.

#include <benchmark/benchmark.h>

#include <cmath>

#include "pairs/closed_form.hpp"
#include "pairs/gmm.hpp"
#include "pairs/model.hpp"
#include "pairs/pde.hpp"
#include "pairs/series.hpp"
#include "pairs/simulate.hpp"

namespace {

pairs::ModelParams reference_params() {
    pairs::ModelParams p;
    p.mu1 = 0.2;
    p.mu2 = 0.08;
    p.sigma1 = 0.3;
    p.sigma2 = 0.35;
    p.delta1 = -0.1;
    p.delta2 = 0.1;
    p.a = -0.01;
    p.b = -0.01;
    p.beta = -0.6;
    p.rho = 0.5;
    p.r = 0.01;
    p.gamma = 0.1;
    p.horizon = 1.0;
    return p;
}

void BM_AssembleSystem(benchmark::State& state) {
    const pairs::ModelParams p = reference_params();
    pairs::GridSpec spec;
    spec.nx = static_cast<int>(state.range(0));
    spec.ny = spec.nx;
    spec.nt = 251;
    const pairs::Grid g = pairs::build_grid(spec, p.horizon);
    for (auto _ : state) {
        benchmark::DoNotOptimize(pairs::assemble_implicit_system(1, g, p));
    }
}
BENCHMARK(BM_AssembleSystem)->Arg(41)->Arg(81);

void BM_ImplicitStep(benchmark::State& state) {
    const pairs::ModelParams p = reference_params();
    pairs::GridSpec spec;
    spec.nx = static_cast<int>(state.range(0));
    spec.ny = spec.nx;
    spec.nt = 251;
    const pairs::Grid g = pairs::build_grid(spec, p.horizon);
    const double phi0 = std::pow(1.0 - p.gamma, 1.0 / (1.0 - p.gamma));
    const std::vector<double> start(g.nodes(), phi0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(pairs::step(1, g, p, start));
    }
}
BENCHMARK(BM_ImplicitStep)->Arg(41)->Arg(81);

void BM_PowerCoefficients(benchmark::State& state) {
    const pairs::ModelParams p = reference_params();
    const pairs::DerivedQuantities dq = pairs::derive_quantities(p);
    std::vector<double> grid(252);
    for (int i = 0; i < 252; ++i) grid[static_cast<std::size_t>(i)] = (i == 251) ? 1.0 : i / 251.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(pairs::power_coefficients(p, dq, grid));
    }
}
BENCHMARK(BM_PowerCoefficients);

void BM_SimulatePath(benchmark::State& state) {
    const pairs::ModelParams p = reference_params();
    std::uint64_t seed = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            pairs::simulate_paths(p, static_cast<int>(state.range(0)), 1.0 / 251.0, 1, seed++));
    }
}
BENCHMARK(BM_SimulatePath)->Arg(2510);

void BM_GmmObjective(benchmark::State& state) {
    const pairs::ModelParams p = reference_params();
    const auto paths = pairs::simulate_paths(p, 2510, 1.0 / 251.0, 1, 3);
    const pairs::PriceSeries series = pairs::series_from_path(paths[0]);
    const pairs::ParameterVector lam = pairs::ParameterVector::from_model(p);
    const auto sel = pairs::MomentSpec::just_identified_default().selection;
    for (auto _ : state) {
        benchmark::DoNotOptimize(pairs::objective(series, lam, Eigen::MatrixXd(), sel, series.dt));
    }
}
BENCHMARK(BM_GmmObjective);

}  // namespace

BENCHMARK_MAIN();
