#include <benchmark/benchmark.h>

#include "dpmimo/config.hpp"
#include "dpmimo/experiments.hpp"
#include "dpmimo/numerics.hpp"

namespace {

using namespace dpmimo;

ComplexMatrix scattering(int half_m) {
  SystemConfig c;
  c.K = 1;
  return realize_drop(c, 2 * half_m, 0).R_bs.front();
}

void BM_HermitianSqrt(benchmark::State& state) {
  const ComplexMatrix r = scattering(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(hermitian_psd_sqrt(r));
}
BENCHMARK(BM_HermitianSqrt)->Arg(16)->Arg(50)->Arg(100);

void BM_TraceProduct(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const ComplexMatrix a = scattering(n), b = scattering(n).adjoint();
  for (auto _ : state) benchmark::DoNotOptimize(trace_product(a, b));
}
BENCHMARK(BM_TraceProduct)->Arg(50)->Arg(100);

void BM_ClosedFormMR(benchmark::State& state) {
  SystemConfig c;
  c.M = static_cast<int>(state.range(0));
  const auto link = make_dual_link(c, realize_drop(c, c.M, 0), c.xpd_db);
  for (auto _ : state) benchmark::DoNotOptimize(link.closed_form_mr());
}
BENCHMARK(BM_ClosedFormMR)->Arg(40)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_LinkSetup(benchmark::State& state) {
  SystemConfig c;
  c.M = static_cast<int>(state.range(0));
  const auto drop = realize_drop(c, c.M, 0);
  for (auto _ : state) benchmark::DoNotOptimize(make_dual_link(c, drop, c.xpd_db));
}
BENCHMARK(BM_LinkSetup)->Arg(100)->Unit(benchmark::kMillisecond);

// One Monte Carlo coherence block: estimates, precoders and H W for all UEs.
void BM_Trial(benchmark::State& state) {
  SystemConfig c;
  c.M = static_cast<int>(state.range(0));
  const auto scheme = state.range(1) == 0 ? PrecoderScheme::kMR : PrecoderScheme::kZF;
  const auto path = state.range(2) == 0 ? EstimationPath::kDirect : EstimationPath::kEndToEnd;
  const auto link = make_dual_link(c, realize_drop(c, c.M, 0), c.xpd_db);
  const DualPolTrials trials(link, scheme, path);
  RandomStream rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(trials.sample(rng));
}
BENCHMARK(BM_Trial)
    ->ArgNames({"M", "zf", "e2e"})
    ->Args({100, 0, 0})
    ->Args({100, 1, 0})
    ->Args({100, 1, 1})
    ->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
