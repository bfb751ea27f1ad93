#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "scalenorm/focus_chips.hpp"
#include "scalenorm/focus_labels.hpp"

using namespace scalenorm;

namespace {

void BM_FocusLabelMap(benchmark::State& state) {
  std::mt19937_64 gen(11);
  const ImageSize image{1920, 1152};
  std::uniform_real_distribution<double> side(4, 200), u(0, 1);
  std::vector<GroundTruth> gts;
  for (int i = 0; i < state.range(0); ++i) {
    const double w = side(gen), h = side(gen);
    const double x = u(gen) * (image.width - w), y = u(gen) * (image.height - h);
    gts.push_back({Box{x, y, x + w, y + h}, 0, false});
  }
  for (auto _ : state) benchmark::DoNotOptimize(build_focus_label_map(gts, image, 16, FocusThresholds{}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FocusLabelMap)->Arg(10)->Arg(100);

// A map with `blobs` square regions of high probability over low noise.
ProbabilityMap blob_map(ImageSize image, int blobs, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<float> noise(0.0f, 0.4f);
  ProbabilityMap p = ProbabilityMap::for_image(image, 16, 0.0f);
  for (float& v : p.cells()) v = noise(gen);
  std::uniform_int_distribution<int> row(0, p.height() - 4), col(0, p.width() - 4);
  for (int b = 0; b < blobs; ++b) {
    const int r0 = row(gen), c0 = col(gen);
    for (int r = r0; r < r0 + 3; ++r) {
      for (int c = c0; c < c0 + 3; ++c) p.at(r, c) = 0.9f;
    }
  }
  return p;
}

void BM_GenerateFocusChips(benchmark::State& state) {
  const ImageSize image{1920, 1152};
  const ProbabilityMap p = blob_map(image, static_cast<int>(state.range(0)), 12);
  FocusParams params;
  for (auto _ : state) benchmark::DoNotOptimize(generate_focus_chips(p, params, image));
}
BENCHMARK(BM_GenerateFocusChips)->Arg(0)->Arg(5)->Arg(50);

void BM_Dilate(benchmark::State& state) {
  const ImageSize image{1920, 1152};
  const BinaryMap m = threshold_map(blob_map(image, 20, 13), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(dilate(m, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_Dilate)->Arg(3)->Arg(9);

}  // namespace
