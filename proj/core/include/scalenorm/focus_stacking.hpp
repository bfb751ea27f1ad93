#pragma once

#include <span>
#include <string>
#include <vector>

#include "scalenorm/geometry.hpp"

namespace scalenorm {

enum class MergeMode { hard, soft_gaussian, soft_linear };

const char* to_string(MergeMode mode);
MergeMode merge_mode_from_string(const std::string& s);

struct MergePolicy {
  MergeMode mode = MergeMode::soft_gaussian;
  double iou_threshold = 0.5;
  double sigma = 0.5;
  double score_floor = 0.001;

  void validate() const;
};

inline constexpr double kDefaultBoundaryEpsilon = 1.0;

/// Drops detections that touch a chip edge lying inside the image. Touching an
/// edge that coincides with the image border is allowed. "Touching" means
/// within `epsilon` pixels of the edge or beyond it. Detections and chip share
/// the resized canvas frame of size `canvas`.
std::vector<Detection> prune_boundary_detections(std::span<const Detection> dets,
                                                 const Box& chip, ImageSize canvas,
                                                 double epsilon = kDefaultBoundaryEpsilon);

/// Chip-local detections to the original image: translate by the chip origin
/// inside the canvas, then scale canvas -> original per axis.
std::vector<Detection> project_to_image(std::span<const Detection> dets, ImageSize canvas,
                                        double origin_x, double origin_y, ImageSize original);

/// Class-wise (soft-)NMS over the union of all lists. Output sorted by
/// descending score; equal scores keep input order.
std::vector<Detection> merge_detections(std::span<const std::vector<Detection>> per_scale,
                                        const MergePolicy& policy);

/// Detections produced inside one chip (or a full-image pass), chip-local.
struct ChipDetections {
  int scale_id = 0;
  ImageSize canvas;
  std::optional<Box> chip;  // canvas frame; nullopt = whole canvas
  std::vector<Detection> detections;
};

struct StackingOptions {
  double boundary_epsilon = kDefaultBoundaryEpsilon;
  bool prune_before_range = true;
  bool range_filter = true;
};

/// Full focus-stacking pass for one image: boundary pruning and range
/// filtering per chip, projection to the original frame, then merging.
/// `ranges` holds the canvas-frame valid range of each scale_id.
std::vector<Detection> stack_detections(std::span<const ChipDetections> chips,
                                        std::span<const AreaRange> ranges, ImageSize original,
                                        const MergePolicy& policy,
                                        const StackingOptions& options = {});

}  // namespace scalenorm
