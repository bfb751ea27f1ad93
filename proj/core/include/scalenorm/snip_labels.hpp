#pragma once

#include <span>
#include <vector>

#include "scalenorm/geometry.hpp"

namespace scalenorm {

/// Training label of a region of interest at one pyramid level.
class RoiLabel {
 public:
  enum class Kind { foreground, background, ignore };

  static RoiLabel foreground(int class_id) { return RoiLabel(Kind::foreground, class_id); }
  static RoiLabel background() { return RoiLabel(Kind::background, -1); }
  static RoiLabel ignore() { return RoiLabel(Kind::ignore, -1); }

  Kind kind() const { return kind_; }
  /// Class of the matched ground truth; -1 unless foreground.
  int class_id() const { return class_id_; }

  /// Numeric code: class_id + 1 for foreground (so class 0 stays distinct
  /// from background), 0 for background, -1 for ignore.
  int code() const;

  friend bool operator==(const RoiLabel&, const RoiLabel&) = default;

 private:
  RoiLabel(Kind kind, int class_id) : kind_(kind), class_id_(class_id) {}
  Kind kind_;
  int class_id_;
};

enum class AnchorValidity { train, invalidated };

inline constexpr double kForegroundIou = 0.5;
inline constexpr double kAnchorInvalidationIou = 0.3;

/// True iff range.min < area(box) < range.max. Box and range share a frame.
bool classify_box_validity(const Box& box, const AreaRange& range);

/// Same check for a resized-frame ScaleSpec (absorb flags applied).
bool classify_box_validity(const Box& box, const ScaleSpec& spec);

/// Per-RoI labels. RoIs outside the range are ignored; the rest take the class
/// of the best-overlapping ground truth when IoU >= 0.5, else background.
/// Equal best IoUs resolve to the lowest ground-truth index.
std::vector<RoiLabel> assign_roi_labels(std::span<const Box> rois,
                                        std::span<const GroundTruth> gts,
                                        const AreaRange& range);

/// Anchors overlapping an invalid ground truth with IoU > 0.3 are dropped from
/// training. A ground truth is invalid when its area is outside the range or
/// it is a crowd region.
std::vector<AnchorValidity> invalidate_anchors(std::span<const Box> anchors,
                                               std::span<const GroundTruth> gts,
                                               const AreaRange& range);

/// Keeps the detections whose area lies in the range, preserving order.
std::vector<Detection> filter_detections_by_range(std::span<const Detection> dets,
                                                  const AreaRange& range);

}  // namespace scalenorm
