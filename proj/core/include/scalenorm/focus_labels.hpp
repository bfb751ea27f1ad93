#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "scalenorm/geometry.hpp"

namespace scalenorm {

/// Dense row-major grid at feature-map stride. Cell (row, col) covers pixels
/// [col*stride, (col+1)*stride] x [row*stride, (row+1)*stride].
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, int stride, T fill = T{})
      : width_(width), height_(height), stride_(stride),
        cells_(static_cast<std::size_t>(width) * height, fill) {}

  /// Grid for an image: width = ceil(X / stride), height = ceil(Y / stride).
  static Grid for_image(ImageSize image, int stride, T fill = T{}) {
    return Grid((image.width + stride - 1) / stride, (image.height + stride - 1) / stride,
                stride, fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  int stride() const { return stride_; }
  std::size_t size() const { return cells_.size(); }

  T& at(int row, int col) { return cells_[index(row, col)]; }
  const T& at(int row, int col) const { return cells_[index(row, col)]; }
  std::span<T> cells() { return cells_; }
  std::span<const T> cells() const { return cells_; }

  Box block(int row, int col) const {
    return Box{static_cast<double>(col) * stride_, static_cast<double>(row) * stride_,
               static_cast<double>(col + 1) * stride_, static_cast<double>(row + 1) * stride_};
  }

  bool same_geometry(int width, int height, int stride) const {
    return width_ == width && height_ == height && stride_ == stride;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * width_ + col;
  }

  int width_ = 0;
  int height_ = 0;
  int stride_ = 1;
  std::vector<T> cells_;
};

/// Side-length thresholds, in pixels of the resized frame.
struct FocusThresholds {
  double a = 5.0;
  double b = 64.0;
  double c = 90.0;

  void validate() const;

  friend bool operator==(const FocusThresholds&, const FocusThresholds&) = default;
};

inline constexpr std::int8_t kFocusLabel = 1;
inline constexpr std::int8_t kBackgroundLabel = 0;
inline constexpr std::int8_t kIgnoreLabel = -1;

struct LabelMap {
  Grid<std::int8_t> grid;
  FocusThresholds thresholds;

  friend bool operator==(const LabelMap&, const LabelMap&) = default;
};

/// Foreground probability per cell, values in [0, 1].
using ProbabilityMap = Grid<float>;
/// Thresholded / dilated focus map, values 0 or 1.
using BinaryMap = Grid<std::uint8_t>;

/// Label of one ground truth by its side length sqrt(area): 1 for a < side < b,
/// -1 for side <= a or b <= side <= c, 0 beyond c.
std::int8_t focus_class(double side, const FocusThresholds& t);

/// FocusPixel labels for an image. Ground truths are in the frame of `image`.
/// A cell takes the label of every ground truth it overlaps with positive area;
/// 1 wins over -1, and -1 over 0.
LabelMap build_focus_label_map(std::span<const GroundTruth> gts, ImageSize image, int stride,
                               const FocusThresholds& thresholds);

/// Probability map with 1 on FocusPixel cells and 0 elsewhere.
ProbabilityMap focus_probability(const LabelMap& labels);

/// Cells equal to 1 as a binary map.
BinaryMap focus_cells(const LabelMap& labels);

}  // namespace scalenorm
