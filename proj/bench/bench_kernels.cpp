#include "collapse/flat_torus.hpp"
#include "collapse/lie_complex.hpp"
#include "collapse/mapping_torus.hpp"

#include <benchmark/benchmark.h>

#include <array>

using namespace collapse;

namespace {

Exec mode(const benchmark::State& state) { return state.range(0) ? Exec::parallel : Exec::serial; }

void label(benchmark::State& state) { state.SetLabel(state.range(0) ? "parallel" : "serial"); }

void BM_ExteriorDerivative(benchmark::State& state) {
  using namespace lie;
  const auto h = heisenberg();
  const auto L = direct_sum(direct_sum(h, h), h);
  for (auto _ : state) benchmark::DoNotOptimize(exterior_derivative(L, 4, mode(state)));
  label(state);
}

void BM_PFormSpectrum(benchmark::State& state) {
  const flat_torus::FlatTorus T(flat_torus::gt_gram(0.3).gram() * 40.0);
  for (auto _ : state) benchmark::DoNotOptimize(flat_torus::p_form_spectrum(T, 1, 2000.0, mode(state)));
  label(state);
}

void BM_Diameter(benchmark::State& state) {
  const auto T = flat_torus::gt_gram(0.7);
  for (auto _ : state) benchmark::DoNotOptimize(flat_torus::diameter(T, 1.0 / 400, mode(state)));
  label(state);
}

Matrix jordan3() {
  Matrix B = Matrix::Zero(3, 3);
  B(0, 1) = B(1, 2) = 1;
  return B;
}

void BM_RunCollapse(benchmark::State& state) {
  std::array<double, 10> grid{};
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = std::ldexp(1.0, -static_cast<int>(i) - 1);
  const Matrix B = jordan3();
  for (auto _ : state) benchmark::DoNotOptimize(mapping_torus::run_collapse(B, 2, grid, mode(state)));
  label(state);
}

void BM_SemisimpleFloor(benchmark::State& state) {
  Matrix B = Matrix::Zero(2, 2);
  B(0, 0) = 1;
  B(1, 1) = -1;
  for (auto _ : state) benchmark::DoNotOptimize(mapping_torus::semisimple_floor(B, 200, 8.0, 1, mode(state)));
  label(state);
}

}  // namespace

BENCHMARK(BM_ExteriorDerivative)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PFormSpectrum)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Diameter)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RunCollapse)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SemisimpleFloor)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
