// Serial reference vs OpenMP kernels.

#include <benchmark/benchmark.h>

#include "proxverify/functions.hpp"
#include "proxverify/oracles.hpp"
#include "proxverify/sampling.hpp"
#include "proxverify/verify.hpp"

using namespace proxverify;
using kernels::Execution;

namespace {

Execution mode(const benchmark::State& state) { return state.range(0) == 0 ? Execution::serial : Execution::parallel; }

void label(benchmark::State& state) {
  state.SetLabel(state.range(0) == 0 ? "serial" : "omp x" + std::to_string(kernels::max_threads()));
}

void BM_GridConjugate2d(benchmark::State& state) {
  const auto f = make_huber(0.5, 2);
  const auto grid = GridSpec::budgeted(3.0, 2001, 2);
  const Vector u{0.4, -1.1};
  for (auto _ : state) benchmark::DoNotOptimize(oracles::grid_conjugate(f, u, grid, mode(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size()));
  label(state);
}
BENCHMARK(BM_GridConjugate2d)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_GridArgminProx1d(benchmark::State& state) {
  const auto f = make_abs_l1(1).as_field();
  const GridSpec grid(5.0, 100001, 1);
  for (auto _ : state) benchmark::DoNotOptimize(oracles::grid_argmin_prox(f, 1.0, Vector{0.7}, grid, mode(state)));
  label(state);
}
BENCHMARK(BM_GridArgminProx1d)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_CocoercivitySweep(benchmark::State& state) {
  const auto f = make_quadratic(SymOperator(3, {2, 1, 0, 1, 2, 1, 0, 1, 2}), Vector::zeros(3));
  const auto pairs = sample_pairs(SampleSpec{42, 20000, 2.0}, 3);
  const auto grad = f.gradient_field();
  for (auto _ : state) benchmark::DoNotOptimize(verify::check_cocoercive(grad, 4.0, pairs, mode(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pairs.size()));
  label(state);
}
BENCHMARK(BM_CocoercivitySweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_MidpointSweep(benchmark::State& state) {
  const auto f = make_huber(1.0, 2);
  const ScalarField g = [f](const Vector& x) { return half_sq_norm(x) - f.value(x); };
  const auto pairs = sample_pairs(SampleSpec{42, 20000, 3.0}, 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(oracles::midpoint_convexity_check(g, pairs, verify::kMidpointSlack, mode(state)));
  label(state);
}
BENCHMARK(BM_MidpointSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
