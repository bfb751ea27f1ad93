#pragma once

#include <vector>

#include "scalenorm/focus_labels.hpp"
#include "scalenorm/geometry.hpp"

namespace scalenorm {

struct FocusParams {
  double threshold = 0.5;  // t
  int dilation = 3;        // d, odd
  int min_chip = 512;      // k, pixels
  bool strict_threshold = false;  // p > t instead of p >= t

  void validate() const;
};

BinaryMap threshold_map(const ProbabilityMap& p, double t, bool strict = false);

/// Binary dilation with a d x d square; out-of-map neighbours are ignored.
BinaryMap dilate(const BinaryMap& map, int d);

struct Component {
  std::vector<int> cells;  // row-major indices
  int row_min = 0;
  int col_min = 0;
  int row_max = 0;
  int col_max = 0;
};

/// 8-connected components of the 1-cells, ordered by their first cell in
/// row-major order.
std::vector<Component> connected_components(const BinaryMap& map);

/// Expands a box symmetrically to at least min_side per axis, shifting it back
/// inside the image when it crosses a border. Sides longer than the image are
/// clamped to the image.
Box expand_to_min_size(const Box& b, int min_side, ImageSize image);

/// Replaces overlapping boxes by their enclosing box until no two overlap.
/// Output sorted by (y1, x1, y2, x2).
std::vector<Box> merge_overlapping(std::vector<Box> boxes);

/// FocusChips for one map: threshold, dilate, components, enclosing pixel
/// rectangles grown to the minimum size, then merged. Pixel frame of `image`.
std::vector<Box> generate_focus_chips(const ProbabilityMap& p, const FocusParams& params,
                                      ImageSize image);

}  // namespace scalenorm
