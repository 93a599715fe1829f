#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "homog/direction_table.hpp"
#include "homog/domain_solver.hpp"
#include "homog/flux_corrector.hpp"
#include "homog/two_scale.hpp"

namespace {

using namespace homog;

Weight layered2d() { return Weight(LayeredWeight{Profile{2.0, {{1.0, 1, 0.0}}}}, 2); }

void BM_CellSolve2d(benchmark::State& state) {
  const FluxModel model(2, state.range(1) / 10.0, layered2d());
  const PeriodicGrid grid(2, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_cell(model, {0.6, 0.8}, grid).residual);
}
BENCHMARK(BM_CellSolve2d)->Args({32, 20})->Args({64, 20})->Args({64, 30})->Args({128, 30})->Unit(benchmark::kMillisecond);

void BM_CellSolve1d(benchmark::State& state) {
  const FluxModel model(1, state.range(1) / 10.0, Weight(TrigWeight{2.0, {{1.0, {1, 0}, 0.0}}}, 1));
  const PeriodicGrid grid(1, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_cell(model, {1.0, 0.0}, grid).residual);
}
BENCHMARK(BM_CellSolve1d)->Args({512, 15})->Args({512, 30})->Unit(benchmark::kMillisecond);

void BM_PeriodicPoisson(benchmark::State& state) {
  const PeriodicGrid grid(2, static_cast<int>(state.range(0)));
  const CellField rhs = project_range(CellField::sample(grid, [](const Vec& y) {
    return std::sin(2 * std::numbers::pi * y[0]) * std::cos(6 * std::numbers::pi * y[1]) + y[0] * y[1];
  }));
  for (auto _ : state) benchmark::DoNotOptimize(poisson_periodic(rhs).values().data());
}
BENCHMARK(BM_PeriodicPoisson)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_FluxCorrector(benchmark::State& state) {
  const FluxModel model(2, 3.0, layered2d());
  const PeriodicGrid grid(2, static_cast<int>(state.range(0)));
  const Corrector c = solve_cell(model, {0.6, 0.8}, grid);
  const CellField b = oscillation_flux(model, c, effective_flux(model, c));
  for (auto _ : state) benchmark::DoNotOptimize(build_flux_corrector(b, c.xi).f().size());
}
BENCHMARK(BM_FluxCorrector)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

void BM_DomainSolveOscillating(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const FluxModel model(dim, state.range(2) / 10.0, dim == 1 ? Weight(TrigWeight{2.0, {{1.0, {1, 0}, 0.0}}}, 1)
                                                            : layered2d());
  const DomainMesh mesh(dim, static_cast<int>(state.range(1)));
  const auto zero = [](const Vec&) { return 0.0; };
  const auto one = [](const Vec&) { return 1.0; };
  for (auto _ : state) benchmark::DoNotOptimize(solve_oscillating(model, 0.0625, mesh, zero, one).residual);
}
BENCHMARK(BM_DomainSolveOscillating)
    ->Args({1, 4096, 20})
    ->Args({1, 4096, 30})
    ->Args({2, 128, 20})
    ->Args({2, 128, 30})
    ->Unit(benchmark::kMillisecond);

void BM_Mollify2d(benchmark::State& state) {
  const DomainMesh mesh(2, 256);
  const NodalField f = NodalField::sample(mesh, [](const Vec& x) { return x[0] * x[1]; });
  const double eps = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mollify(f, eps).values().data());
}
BENCHMARK(BM_Mollify2d)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_DirectionTable2d(benchmark::State& state) {
  const FluxModel model(2, 3.0, layered2d());
  const PeriodicGrid grid(2, 32);
  for (auto _ : state) benchmark::DoNotOptimize(DirectionTable(model, grid, {}, static_cast<int>(state.range(0))).max_residual());
}
BENCHMARK(BM_DirectionTable2d)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
