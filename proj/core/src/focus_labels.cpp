#include "scalenorm/focus_labels.hpp"

#include <algorithm>
#include <cmath>

#include "scalenorm/error.hpp"

namespace scalenorm {

void FocusThresholds::validate() const {
  if (!(0.0 <= a && a < b && b < c)) {
    throw invalid_argument("focus thresholds must satisfy 0 <= a < b < c");
  }
}

std::int8_t focus_class(double side, const FocusThresholds& t) {
  if (t.a < side && side < t.b) return kFocusLabel;
  if (side <= t.a) return kIgnoreLabel;
  if (side <= t.c) return kIgnoreLabel;  // b <= side <= c
  return kBackgroundLabel;
}

LabelMap build_focus_label_map(std::span<const GroundTruth> gts, ImageSize image, int stride,
                               const FocusThresholds& thresholds) {
  if (stride < 1) throw invalid_argument("focus labels: stride must be >= 1");
  if (!image.valid()) throw invalid_argument("focus labels: invalid image size");
  thresholds.validate();
  LabelMap map{Grid<std::int8_t>::for_image(image, stride, kBackgroundLabel), thresholds};
  auto& grid = map.grid;
  for (const GroundTruth& gt : gts) {
    const std::int8_t label = focus_class(std::sqrt(std::max(0.0, gt.box.area())), thresholds);
    if (label == kBackgroundLabel) continue;
    const Box& b = gt.box;
    if (!(b.x2 > b.x1 && b.y2 > b.y1)) continue;
    // Cells with positive-area overlap: col*s < x2 and (col+1)*s > x1.
    const int c0 = std::max(0, static_cast<int>(std::floor(b.x1 / stride)));
    const int c1 = std::min(grid.width() - 1, static_cast<int>(std::ceil(b.x2 / stride)) - 1);
    const int r0 = std::max(0, static_cast<int>(std::floor(b.y1 / stride)));
    const int r1 = std::min(grid.height() - 1, static_cast<int>(std::ceil(b.y2 / stride)) - 1);
    for (int r = r0; r <= r1; ++r) {
      for (int c = c0; c <= c1; ++c) {
        std::int8_t& cell = grid.at(r, c);
        if (label == kFocusLabel || cell != kFocusLabel) cell = label;
      }
    }
  }
  return map;
}

ProbabilityMap focus_probability(const LabelMap& labels) {
  const auto& g = labels.grid;
  ProbabilityMap p(g.width(), g.height(), g.stride(), 0.0f);
  for (std::size_t i = 0; i < g.size(); ++i) {
    p.cells()[i] = g.cells()[i] == kFocusLabel ? 1.0f : 0.0f;
  }
  return p;
}

BinaryMap focus_cells(const LabelMap& labels) {
  const auto& g = labels.grid;
  BinaryMap m(g.width(), g.height(), g.stride(), 0);
  for (std::size_t i = 0; i < g.size(); ++i) m.cells()[i] = g.cells()[i] == kFocusLabel;
  return m;
}

}  // namespace scalenorm
