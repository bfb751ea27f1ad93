#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <variant>
#include <vector>

namespace scalenorm {

/// Axis-aligned rectangle in continuous pixel coordinates, corner form.
struct Box {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }
  double center_x() const { return 0.5 * (x1 + x2); }
  double center_y() const { return 0.5 * (y1 + y2); }
  bool valid() const { return x1 <= x2 && y1 <= y2; }

  friend bool operator==(const Box&, const Box&) = default;
};

struct ImageSize {
  int width = 1;
  int height = 1;

  long long area() const { return static_cast<long long>(width) * height; }
  bool valid() const { return width >= 1 && height >= 1; }

  friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

/// Builds a corner-form box from COCO-style [x, y, w, h].
inline Box box_from_xywh(double x, double y, double w, double h) {
  return Box{x, y, x + w, y + h};
}

/// Area of the overlap of two boxes; 0 when they do not overlap.
double intersection_area(const Box& a, const Box& b);

/// Overlap rectangle if it has positive area.
std::optional<Box> intersection(const Box& a, const Box& b);

/// Smallest box enclosing both inputs.
Box enclosing(const Box& a, const Box& b);

/// Intersection over union. Zero-area boxes give 0 against anything,
/// including an identical zero-area box.
double iou(const Box& a, const Box& b);

/// True iff both boxes share a region of positive area.
bool overlaps(const Box& a, const Box& b);

/// Maps a box between two frames of the same image. Each axis is scaled by
/// its own factor (to / from).
Box rescale_box(const Box& b, ImageSize from, ImageSize to);

/// Closed containment: boundary contact counts as inside.
bool encloses(const Box& outer, const Box& inner);

/// Clamps a box into [0, size.width] x [0, size.height].
Box clamp_box(const Box& b, ImageSize size);

/// Open interval (min, max) of box areas in squared pixels. max may be +inf.
struct AreaRange {
  double min = 0.0;
  double max = std::numeric_limits<double>::infinity();

  /// Strict on both ends: an area equal to min or max is outside.
  bool contains(double area) const { return min < area && area < max; }
  bool unbounded() const { return std::isinf(max); }

  friend bool operator==(const AreaRange&, const AreaRange&) = default;
};

/// Frame in which a ScaleSpec's valid range is expressed.
enum class RangeFrame {
  resized,   // areas measured on the resized canvas of the level
  original,  // areas measured on the original image
};

/// Target resolution of one pyramid level.
struct ScaleFactor {
  double value = 1.0;
  friend bool operator==(const ScaleFactor&, const ScaleFactor&) = default;
};
/// Longest side resized to this many pixels, aspect preserved.
struct MaxSide {
  int pixels = 512;
  friend bool operator==(const MaxSide&, const MaxSide&) = default;
};
using ScaleTarget = std::variant<ScaleFactor, MaxSide, ImageSize>;

/// One pyramid level.
struct ScaleSpec {
  int scale_id = 0;
  ScaleTarget target = ScaleFactor{1.0};
  AreaRange valid_range;
  RangeFrame range_frame = RangeFrame::resized;
  int chip_size = 512;
  int chip_stride = 32;
  // Widen the range to (0, max) or (min, inf). Used on the extreme levels so
  // that boxes outside every range are still trained somewhere.
  bool absorb_below = false;
  bool absorb_above = false;

  /// Valid range with absorb flags applied, in range_frame.
  AreaRange effective_range() const;

  /// Resized canvas for an image of the given original size.
  ImageSize canvas(ImageSize original) const;

  /// Effective range converted to the canvas frame of an image.
  AreaRange canvas_range(ImageSize original) const;

  /// Throws InvalidArgument when an invariant is broken.
  void validate() const;
};

/// A ground-truth object in the original image frame.
struct GroundTruth {
  Box box;
  int class_id = 0;
  bool crowd = false;
};

/// One image with its annotations, original frame.
struct AnnotatedImage {
  long long image_id = 0;
  ImageSize size;
  std::vector<GroundTruth> gts;
};

/// Where a detection was produced.
struct DetectionSource {
  int scale_id = -1;
  std::optional<Box> chip;  // nullopt for a full-image pass
};

struct Detection {
  Box box;
  double score = 0.0;
  int class_id = 0;
  DetectionSource source;
};

}  // namespace scalenorm
