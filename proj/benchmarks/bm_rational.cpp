#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "elk/rational.hpp"

// The rational layer sits on every gluing-validation hot path, so keep an eye
// on parse/format cost.

static void BM_FracParseDecimal(benchmark::State& state) {
  const std::vector<std::string> inputs = {"0.125", "3/4", "-2", "0.7071067811", "1e-3"};
  size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(elk::frac_parse(inputs[i++ % inputs.size()]));
  }
}
BENCHMARK(BM_FracParseDecimal);

static void BM_FracFromDouble(benchmark::State& state) {
  double x = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(elk::frac_from_double(x));
    x += 0.0;  // keep x loop-invariant; the convergent walk dominates anyway
  }
}
BENCHMARK(BM_FracFromDouble);

static void BM_RealRoundTrip(benchmark::State& state) {
  double x = 0.1234567890123456;
  for (auto _ : state) {
    benchmark::DoNotOptimize(elk::parse_real(elk::fmt_real(x)));
  }
}
BENCHMARK(BM_RealRoundTrip);

BENCHMARK_MAIN();
