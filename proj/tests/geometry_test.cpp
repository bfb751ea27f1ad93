#include <gtest/gtest.h>

#include <limits>

#include "scalenorm/error.hpp"
#include "scalenorm/geometry.hpp"
#include "support.hpp"

using namespace scalenorm;
using scalenorm::testing::Rng;

TEST(Iou, IdenticalBoxes) { EXPECT_DOUBLE_EQ(iou({0, 0, 10, 10}, {0, 0, 10, 10}), 1.0); }

TEST(Iou, DisjointBoxes) { EXPECT_DOUBLE_EQ(iou({0, 0, 10, 10}, {20, 20, 30, 30}), 0.0); }

TEST(Iou, HalfShifted) {
  // intersection 50, union 150
  EXPECT_DOUBLE_EQ(iou({0, 0, 10, 10}, {5, 0, 15, 10}), 1.0 / 3.0);
}

TEST(Iou, TouchingEdgesHaveNoOverlap) {
  EXPECT_DOUBLE_EQ(iou({0, 0, 10, 10}, {10, 0, 20, 10}), 0.0);
  EXPECT_FALSE(overlaps({0, 0, 10, 10}, {10, 0, 20, 10}));
}

TEST(Iou, DegenerateBoxesGiveZero) {
  EXPECT_DOUBLE_EQ(iou({5, 5, 5, 5}, {5, 5, 5, 5}), 0.0);
  EXPECT_DOUBLE_EQ(iou({0, 0, 0, 10}, {0, 0, 10, 10}), 0.0);
}

TEST(Iou, SymmetricOnRandomBoxes) {
  Rng rng(1);
  for (int i = 0; i < 2000; ++i) {
    const Box a = scalenorm::testing::random_lattice_box(rng, {60, 60}, 40);
    const Box b = scalenorm::testing::random_lattice_box(rng, {60, 60}, 40);
    EXPECT_EQ(iou(a, b), iou(b, a));
    EXPECT_GE(iou(a, b), 0.0);
    EXPECT_LE(iou(a, b), 1.0);
    if (a.area() > 0 && b.area() > 0) EXPECT_EQ(iou(a, b) == 1.0, a == b);
  }
}

TEST(Intersection, ReturnsOverlapRectangle) {
  const auto r = intersection({0, 0, 10, 10}, {5, 2, 20, 8});
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(*r, (Box{5, 2, 10, 8}));
  EXPECT_FALSE(intersection({0, 0, 10, 10}, {10, 10, 20, 20}).has_value());
}

TEST(Enclosing, CoversBoth) {
  EXPECT_EQ(enclosing({0, 5, 10, 10}, {3, 0, 20, 8}), (Box{0, 0, 20, 10}));
}

TEST(RescaleBox, UniformDoubling) {
  EXPECT_EQ(rescale_box({10, 10, 20, 20}, {100, 100}, {200, 200}), (Box{20, 20, 40, 40}));
}

TEST(RescaleBox, IdentityWhenFramesMatch) {
  const Box b{1.5, 2.25, 7.75, 9};
  EXPECT_EQ(rescale_box(b, {37, 41}, {37, 41}), b);
}

TEST(RescaleBox, PerAxisFactors) {
  EXPECT_EQ(rescale_box({0, 0, 50, 25}, {100, 50}, {300, 100}), (Box{0, 0, 150, 50}));
}

TEST(RescaleBox, ComposesAcrossFrames) {
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const ImageSize a = scalenorm::testing::random_image(rng, 1, 3000);
    const ImageSize b = scalenorm::testing::random_image(rng, 1, 3000);
    const ImageSize c = scalenorm::testing::random_image(rng, 1, 3000);
    const Box x = scalenorm::testing::random_box(rng, a, 0.5, 3000);
    const Box two = rescale_box(rescale_box(x, a, b), b, c);
    const Box one = rescale_box(x, a, c);
    EXPECT_LE(scalenorm::testing::relative_error(two.x1, one.x1), 1e-9);
    EXPECT_LE(scalenorm::testing::relative_error(two.y2, one.y2), 1e-9);
  }
}

TEST(Encloses, InsideCrossingAndEqual) {
  const Box chip{0, 0, 512, 512};
  EXPECT_TRUE(encloses(chip, {10, 10, 20, 20}));
  EXPECT_FALSE(encloses(chip, {500, 10, 520, 20}));
  EXPECT_TRUE(encloses(chip, chip));
}

TEST(Encloses, MutualContainmentMeansEqual) {
  Rng rng(3);
  for (int i = 0; i < 5000; ++i) {
    const Box a = scalenorm::testing::random_lattice_box(rng, {8, 8}, 8);
    const Box b = scalenorm::testing::random_lattice_box(rng, {8, 8}, 8);
    if (encloses(a, b) && encloses(b, a)) EXPECT_EQ(a, b);
  }
}

TEST(ClampBox, KeepsInsideImage) {
  EXPECT_EQ(clamp_box({-5, -5, 700, 20}, {640, 480}), (Box{0, 0, 640, 20}));
  EXPECT_EQ(clamp_box({700, 10, 800, 20}, {640, 480}), (Box{640, 10, 640, 20}));
}

TEST(AreaRange, StrictOnBothEnds) {
  const AreaRange r{32.0 * 32.0, 150.0 * 150.0};
  EXPECT_FALSE(r.contains(32.0 * 32.0));
  EXPECT_FALSE(r.contains(150.0 * 150.0));
  EXPECT_TRUE(r.contains(60.0 * 60.0));
  EXPECT_TRUE(AreaRange{}.contains(1e12));
  EXPECT_FALSE(AreaRange{}.contains(0.0));
}

TEST(ScaleSpec, CanvasRounding) {
  ScaleSpec s;
  s.target = ScaleFactor{1.667};
  EXPECT_EQ(s.canvas({640, 480}), (ImageSize{1067, 800}));
  s.target = MaxSide{512};
  EXPECT_EQ(s.canvas({640, 427}), (ImageSize{512, 342}));
  EXPECT_EQ(s.canvas({427, 640}), (ImageSize{342, 512}));
  s.target = ImageSize{300, 200};
  EXPECT_EQ(s.canvas({640, 480}), (ImageSize{300, 200}));
  s.target = ScaleFactor{1e-6};
  EXPECT_EQ(s.canvas({640, 480}), (ImageSize{1, 1}));
}

TEST(ScaleSpec, AbsorbFlagsWidenRange) {
  ScaleSpec s;
  s.valid_range = {100.0, 200.0};
  s.absorb_below = true;
  EXPECT_EQ(s.effective_range().min, 0.0);
  EXPECT_EQ(s.effective_range().max, 200.0);
  s.absorb_below = false;
  s.absorb_above = true;
  EXPECT_EQ(s.effective_range().min, 100.0);
  EXPECT_TRUE(s.effective_range().unbounded());
}

TEST(ScaleSpec, CanvasRangeConvertsOriginalFrame) {
  ScaleSpec s;
  s.target = ScaleFactor{3.0};
  s.valid_range = {0.0, 80.0 * 80.0};
  s.range_frame = RangeFrame::original;
  const AreaRange r = s.canvas_range({640, 480});
  EXPECT_DOUBLE_EQ(r.max, 240.0 * 240.0);
  s.range_frame = RangeFrame::resized;
  EXPECT_DOUBLE_EQ(s.canvas_range({640, 480}).max, 80.0 * 80.0);
}

TEST(ScaleSpec, ValidateRejectsBrokenInvariants) {
  ScaleSpec s;
  s.valid_range = {10.0, 10.0};
  EXPECT_THROW(s.validate(), Error);
  s.valid_range = {0.0, 10.0};
  s.chip_size = 16;
  s.chip_stride = 32;
  EXPECT_THROW(s.validate(), Error);
  s.chip_stride = 0;
  EXPECT_THROW(s.validate(), Error);
  s.chip_size = 512;
  s.chip_stride = 32;
  s.target = ScaleFactor{-1.0};
  EXPECT_THROW(s.validate(), Error);
  s.target = ScaleFactor{2.0};
  EXPECT_NO_THROW(s.validate());
}
