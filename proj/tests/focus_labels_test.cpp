#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles/oracles.hpp"
#include "scalenorm/error.hpp"
#include "scalenorm/focus_labels.hpp"
#include "support.hpp"

using namespace scalenorm;
using scalenorm::testing::Rng;

namespace {

const FocusThresholds kDefault{};

GroundTruth square(double x, double y, double side) {
  return GroundTruth{Box{x, y, x + side, y + side}, 0, false};
}

}  // namespace

TEST(FocusClass, Boundaries) {
  EXPECT_EQ(focus_class(3.0, kDefault), kIgnoreLabel);
  EXPECT_EQ(focus_class(5.0, kDefault), kIgnoreLabel);
  EXPECT_EQ(focus_class(5.5, kDefault), kFocusLabel);
  EXPECT_EQ(focus_class(63.9, kDefault), kFocusLabel);
  EXPECT_EQ(focus_class(64.0, kDefault), kIgnoreLabel);
  EXPECT_EQ(focus_class(90.0, kDefault), kIgnoreLabel);
  EXPECT_EQ(focus_class(90.1, kDefault), kBackgroundLabel);
}

TEST(FocusLabelMap, GridIsCeilOfImageOverStride) {
  const LabelMap m = build_focus_label_map({}, {100, 33}, 16, kDefault);
  EXPECT_EQ(m.grid.width(), 7);
  EXPECT_EQ(m.grid.height(), 3);
  EXPECT_EQ(m.grid.stride(), 16);
  for (std::int8_t v : m.grid.cells()) EXPECT_EQ(v, kBackgroundLabel);
}

TEST(FocusLabelMap, SmallObjectMarksItsCells) {
  // A 40x40 object at (20, 20) covers cells 1..3 in both axes.
  const LabelMap m = build_focus_label_map(std::vector{square(20, 20, 40)}, {128, 128}, 16, kDefault);
  for (int r = 0; r < m.grid.height(); ++r) {
    for (int c = 0; c < m.grid.width(); ++c) {
      const bool in = r >= 1 && r <= 3 && c >= 1 && c <= 3;
      EXPECT_EQ(m.grid.at(r, c), in ? kFocusLabel : kBackgroundLabel) << r << "," << c;
    }
  }
}

TEST(FocusLabelMap, TouchingEdgeIsNotOverlap) {
  // Box ends exactly on the boundary of cell column 2.
  const LabelMap m = build_focus_label_map(std::vector{square(0, 0, 32)}, {64, 64}, 16, kDefault);
  EXPECT_EQ(m.grid.at(0, 1), kFocusLabel);
  EXPECT_EQ(m.grid.at(0, 2), kBackgroundLabel);
  EXPECT_EQ(m.grid.at(2, 0), kBackgroundLabel);
}

TEST(FocusLabelMap, MediumAndTinyAreIgnored) {
  const LabelMap m =
      build_focus_label_map(std::vector{square(0, 0, 80), square(100, 100, 4)}, {160, 160}, 16, kDefault);
  EXPECT_EQ(m.grid.at(0, 0), kIgnoreLabel);
  EXPECT_EQ(m.grid.at(4, 4), kIgnoreLabel);
  EXPECT_EQ(m.grid.at(6, 6), kIgnoreLabel);
  EXPECT_EQ(m.grid.at(9, 9), kBackgroundLabel);
}

TEST(FocusLabelMap, LargeObjectLeavesBackground) {
  const LabelMap m = build_focus_label_map(std::vector{square(0, 0, 120)}, {128, 128}, 16, kDefault);
  for (std::int8_t v : m.grid.cells()) EXPECT_EQ(v, kBackgroundLabel);
}

TEST(FocusLabelMap, FocusWinsOverIgnore) {
  const std::vector<GroundTruth> gts{square(0, 0, 80), square(10, 10, 30)};
  const LabelMap m = build_focus_label_map(gts, {128, 128}, 16, kDefault);
  EXPECT_EQ(m.grid.at(1, 1), kFocusLabel);
  EXPECT_EQ(m.grid.at(4, 4), kIgnoreLabel);
  // Order of the ground truths does not matter.
  const std::vector<GroundTruth> swapped{gts[1], gts[0]};
  EXPECT_EQ(build_focus_label_map(swapped, {128, 128}, 16, kDefault), m);
}

TEST(FocusLabelMap, MatchesBruteForceOracle) {
  Rng rng(31);
  for (int trial = 0; trial < 400; ++trial) {
    const ImageSize image = scalenorm::testing::random_image(rng, 1, 300);
    const int stride = rng.pick(std::vector<int>{1, 4, 8, 16, 32});
    std::vector<GroundTruth> gts;
    for (int g = rng.integer(0, 8); g > 0; --g) {
      GroundTruth gt{scalenorm::testing::random_lattice_box(rng, image, 120, rng.chance(0.5) ? 1.0 : 0.5), 0,
                     rng.chance(0.1)};
      if (rng.chance(0.2)) {
        const double side = rng.pick(std::vector<double>{5.0, 64.0, 90.0});
        gt.box = Box{gt.box.x1, gt.box.y1, gt.box.x1 + side, gt.box.y1 + side};
      }
      gts.push_back(gt);
    }
    const LabelMap m = build_focus_label_map(gts, image, stride, kDefault);
    int w = 0;
    int h = 0;
    const std::vector<int> want = oracle::focus_label_grid(image, stride, gts, 5, 64, 90, w, h);
    ASSERT_EQ(m.grid.width(), w);
    ASSERT_EQ(m.grid.height(), h);
    for (std::size_t i = 0; i < want.size(); ++i) {
      ASSERT_EQ(int(m.grid.cells()[i]), want[i]) << "trial " << trial << " cell " << i;
    }
  }
}

TEST(FocusLabelMap, ScaleSweepSelectsObject) {
  // The same object is focus only while its resized side falls in (a, b).
  const Box original{100, 100, 140, 140};
  for (double f : {0.1, 0.2, 0.5, 1.0, 1.5, 1.6, 2.0, 2.3, 3.0}) {
    const ImageSize canvas{int(std::lround(400 * f)), int(std::lround(400 * f))};
    const Box b = rescale_box(original, {400, 400}, canvas);
    const LabelMap m = build_focus_label_map(std::vector{GroundTruth{b, 0, false}}, canvas, 16, kDefault);
    const double side = std::sqrt(b.area());
    bool any_focus = false;
    for (std::int8_t v : m.grid.cells()) any_focus = any_focus || v == kFocusLabel;
    EXPECT_EQ(any_focus, side > 5.0 && side < 64.0) << "factor " << f;
  }
}

TEST(FocusLabelMap, EveryFocusCellOverlapsASmallObject) {
  Rng rng(32);
  for (int trial = 0; trial < 200; ++trial) {
    const ImageSize image = scalenorm::testing::random_image(rng, 32, 800);
    const auto gts = scalenorm::testing::random_gts(rng, image, 0, 15, 2, 200);
    const LabelMap m = build_focus_label_map(gts, image, 16, kDefault);
    for (int r = 0; r < m.grid.height(); ++r) {
      for (int c = 0; c < m.grid.width(); ++c) {
        if (m.grid.at(r, c) != kFocusLabel) continue;
        bool ok = false;
        for (const GroundTruth& g : gts) {
          const double side = std::sqrt(g.box.area());
          ok = ok || (side > 5 && side < 64 && oracle::overlap_area(m.grid.block(r, c), g.box) > 0);
        }
        EXPECT_TRUE(ok);
      }
    }
  }
}

TEST(FocusThresholds, ValidateOrdering) {
  EXPECT_NO_THROW(kDefault.validate());
  EXPECT_THROW((FocusThresholds{64, 5, 90}.validate()), Error);
  EXPECT_THROW((FocusThresholds{5, 95, 90}.validate()), Error);
  EXPECT_THROW((FocusThresholds{-1, 64, 90}.validate()), Error);
}

TEST(FocusLabelMap, RejectsBadStride) {
  EXPECT_THROW(build_focus_label_map({}, {100, 100}, 0, kDefault), Error);
}

TEST(FocusProbability, OnesOnFocusCells) {
  const LabelMap m = build_focus_label_map(std::vector{square(0, 0, 20), square(60, 60, 80)}, {160, 160}, 16, kDefault);
  const ProbabilityMap p = focus_probability(m);
  const BinaryMap b = focus_cells(m);
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_EQ(p.cells()[i], m.grid.cells()[i] == kFocusLabel ? 1.0f : 0.0f);
    EXPECT_EQ(b.cells()[i], m.grid.cells()[i] == kFocusLabel ? 1 : 0);
  }
}
