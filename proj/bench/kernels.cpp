#include <benchmark/benchmark.h>

#include "bucketwidth/bandwidth.hpp"
#include "bucketwidth/bucket_function.hpp"
#include "bucketwidth/distortion.hpp"
#include "bucketwidth/oracle.hpp"

using namespace bucketwidth;

namespace {

ExecPolicy policy_of(const benchmark::State& state) {
  return state.range(0) == 0 ? ExecPolicy::serial : ExecPolicy::parallel;
}

// Ladder with a chord: connected, not too symmetric.
Graph ladder(int rungs) {
  Graph g(2 * rungs);
  for (int i = 0; i < rungs; ++i) {
    g.add_edge(2 * i, 2 * i + 1);
    if (i + 1 < rungs) {
      g.add_edge(2 * i, 2 * i + 2);
      g.add_edge(2 * i + 1, 2 * i + 3);
    }
  }
  g.add_edge(0, 2 * rungs - 1);
  return g;
}

void BM_PathPrototypes(benchmark::State& state) {
  const int len = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(count_path_prototypes(len, true, true, policy_of(state)));
}
BENCHMARK(BM_PathPrototypes)->ArgsProduct({{0, 1}, {10, 12}})->Unit(benchmark::kMillisecond);

void BM_BandwidthOracle(benchmark::State& state) {
  Graph g = ladder(4);
  for (auto _ : state) benchmark::DoNotOptimize(bandwidth_bruteforce(g, policy_of(state)));
}
BENCHMARK(BM_BandwidthOracle)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_DistortionOracle(benchmark::State& state) {
  Graph g = ladder(4);
  for (auto _ : state) benchmark::DoNotOptimize(distortion_bruteforce(g, policy_of(state)));
}
BENCHMARK(BM_DistortionOracle)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_BandwidthPolyspace(benchmark::State& state) {
  Graph g = ladder(4);
  PolyspaceOptions options;
  options.policy = policy_of(state);
  const int b = bandwidth_bruteforce(g).first;
  for (auto _ : state) benchmark::DoNotOptimize(solve_polyspace(g, b - 1, options));
}
BENCHMARK(BM_BandwidthPolyspace)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_DistortionGuesses(benchmark::State& state) {
  Graph g = ladder(3);
  DistortionOptions options;
  options.policy = policy_of(state);
  const int d = distortion_bruteforce(g)->first;
  for (auto _ : state) benchmark::DoNotOptimize(solve_distortion(g, d - 1, options));
}
BENCHMARK(BM_DistortionGuesses)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
