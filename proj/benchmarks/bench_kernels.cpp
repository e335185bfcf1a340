#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "longtail/innovations.hpp"
#include "longtail/linear_process.hpp"
#include "longtail/stable.hpp"

using namespace longtail;

namespace {

ProcessSpec bench_spec(std::size_t horizon) {
  ProcessSpec spec;
  spec.d = 0.2;
  spec.horizon = horizon;
  spec.innovation = InnovationSpec::symmetric_stable(1.5);
  return spec;
}

// Convolution cost for n = J. The direct kernel only serves as a reference;
// FFT already wins at n = 64.
void BM_ConvolveDirect(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto spec = bench_spec(n);
  const auto coeffs = coefficients(spec);
  const auto eps = sample_innovations(spec.innovation, n + n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(convolve_direct(coeffs, eps, n));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ConvolveDirect)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oNSquared);

void BM_ConvolveFft(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto spec = bench_spec(n);
  const auto coeffs = coefficients(spec);
  const FftConvolver conv(coeffs, n);
  const auto eps = sample_innovations(spec.innovation, n + n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(conv.apply(eps));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ConvolveFft)->RangeMultiplier(4)->Range(64, 1 << 18)->Complexity(benchmark::oNLogN);

void BM_SimulatePath(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const PathSimulator sim(bench_spec(4 * n), n);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sim.simulate(++seed));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulatePath)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);

void BM_StableSampler(benchmark::State& state) {
  const StableLaw law(1.5, 1.0);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_sas(law, 4096, ++seed));
  state.SetItemsProcessed(state.iterations() * 4096);
}
BENCHMARK(BM_StableSampler);

void BM_StableCdf(benchmark::State& state) {
  const StableLaw law(1.5, 1.0);
  const double x = static_cast<double>(state.range(0)) / 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(sas_cdf(law, x));
}
BENCHMARK(BM_StableCdf)->Arg(1)->Arg(10)->Arg(50)->Arg(500);

void BM_StablePdf(benchmark::State& state) {
  const StableLaw law(1.5, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(sas_pdf(law, 1.3));
}
BENCHMARK(BM_StablePdf);

}  // namespace

BENCHMARK_MAIN();
