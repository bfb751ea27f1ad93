#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "scalenorm/focus_stacking.hpp"

using namespace scalenorm;

namespace {

std::vector<Detection> detections(int n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> pos(0, 1200), side(10, 150), score(0.01, 1);
  std::uniform_int_distribution<int> cls(0, 9);
  std::vector<Detection> d;
  for (int i = 0; i < n; ++i) {
    const double x = pos(gen), y = pos(gen);
    d.push_back({Box{x, y, x + side(gen), y + side(gen)}, score(gen), cls(gen), {}});
  }
  return d;
}

void run_merge(benchmark::State& state, MergeMode mode) {
  const std::vector<std::vector<Detection>> per_scale{detections(static_cast<int>(state.range(0)), 21),
                                                      detections(static_cast<int>(state.range(0)), 22)};
  MergePolicy policy;
  policy.mode = mode;
  for (auto _ : state) benchmark::DoNotOptimize(merge_detections(per_scale, policy));
  state.SetItemsProcessed(state.iterations() * 2 * state.range(0));
}

void BM_HardNms(benchmark::State& state) { run_merge(state, MergeMode::hard); }
void BM_SoftNmsGaussian(benchmark::State& state) { run_merge(state, MergeMode::soft_gaussian); }
BENCHMARK(BM_HardNms)->Arg(100)->Arg(1000);
BENCHMARK(BM_SoftNmsGaussian)->Arg(100)->Arg(1000);

void BM_PruneBoundary(benchmark::State& state) {
  const auto dets = detections(static_cast<int>(state.range(0)), 23);
  const Box chip{256, 256, 768, 768};
  for (auto _ : state) benchmark::DoNotOptimize(prune_boundary_detections(dets, chip, ImageSize{1400, 1400}));
}
BENCHMARK(BM_PruneBoundary)->Arg(1000);

}  // namespace
