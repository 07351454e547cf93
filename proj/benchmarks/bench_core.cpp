#include <benchmark/benchmark.h>

#include "sipdyn/codim1.hpp"
#include "sipdyn/codim2.hpp"
#include "sipdyn/equilibria.hpp"
#include "sipdyn/integrate.hpp"
#include "sipdyn/model.hpp"
#include "sipdyn/numerics.hpp"
#include "sipdyn/scan.hpp"

using namespace sipdyn;

namespace {

const State kPoint{2.6134, 0.7875, 2.7887};

void BM_rhs(benchmark::State& st) {
  const Parameters p;
  const Vec3 x = kPoint.vec();
  for (auto _ : st) benchmark::DoNotOptimize(rhs(x, p));
}
BENCHMARK(BM_rhs);

void BM_jacobian(benchmark::State& st) {
  const Parameters p;
  for (auto _ : st) benchmark::DoNotOptimize(jacobian(kPoint, p));
}
BENCHMARK(BM_jacobian);

void BM_eig3(benchmark::State& st) {
  const Matrix3 J = jacobian(kPoint, Parameters{});
  for (auto _ : st) benchmark::DoNotOptimize(eig3(J));
}
BENCHMARK(BM_eig3);

void BM_interior_equilibria(benchmark::State& st) {
  const Parameters p = Parameters{}.with(ParamId::L, -0.1);
  for (auto _ : st) benchmark::DoNotOptimize(interior_equilibria(p));
}
BENCHMARK(BM_interior_equilibria);

void BM_simulate(benchmark::State& st) {
  const Parameters p;
  SimOptions o;
  o.stop_on_convergence = false;
  for (auto _ : st) benchmark::DoNotOptimize(simulate(p, {2, 1, 3}, o));
}
BENCHMARK(BM_simulate)->Unit(benchmark::kMillisecond);

void BM_sweep_L(benchmark::State& st) {
  SweepOptions o;
  o.threads = static_cast<unsigned>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(sweep(Parameters{}, ParamId::L, -0.6, 0.6, 1201, o));
}
BENCHMARK(BM_sweep_L)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_trace_hopf(benchmark::State& st) {
  TraceOptions o;
  o.steps = 600;
  for (auto _ : st)
    benchmark::DoNotOptimize(
        trace_curve(Parameters{}, CurveKind::hopf, ParamId::L, ParamId::a0, {0.2184, 3.0}, o));
}
BENCHMARK(BM_trace_hopf)->Unit(benchmark::kMillisecond);

void BM_region_grid(benchmark::State& st) {
  ScanOptions s;
  s.threads = 4;
  for (auto _ : st)
    benchmark::DoNotOptimize(
        region_grid(Parameters{}, {-1, 1}, {0.05, 0.95}, 21, 21, {2, 1, 3}, SimOptions{}, s));
}
BENCHMARK(BM_region_grid)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
