#include "scalenorm/snip_labels.hpp"

#include "scalenorm/error.hpp"

namespace scalenorm {

int RoiLabel::code() const {
  switch (kind_) {
    case Kind::foreground:
      return class_id_ + 1;
    case Kind::background:
      return 0;
    case Kind::ignore:
      return -1;
  }
  return -1;
}

bool classify_box_validity(const Box& box, const AreaRange& range) {
  return range.contains(box.area());
}

bool classify_box_validity(const Box& box, const ScaleSpec& spec) {
  if (spec.range_frame != RangeFrame::resized) {
    throw invalid_argument(
        "classify_box_validity: range is in the original frame; use canvas_range()");
  }
  return classify_box_validity(box, spec.effective_range());
}

std::vector<RoiLabel> assign_roi_labels(std::span<const Box> rois,
                                        std::span<const GroundTruth> gts,
                                        const AreaRange& range) {
  std::vector<RoiLabel> labels;
  labels.reserve(rois.size());
  for (const Box& roi : rois) {
    if (!classify_box_validity(roi, range)) {
      labels.push_back(RoiLabel::ignore());
      continue;
    }
    double best = 0.0;
    int best_class = -1;
    for (const GroundTruth& gt : gts) {
      const double o = iou(roi, gt.box);
      if (o > best) {  // strict: first index wins ties
        best = o;
        best_class = gt.class_id;
      }
    }
    if (best_class >= 0 && best >= kForegroundIou) {
      labels.push_back(RoiLabel::foreground(best_class));
    } else {
      labels.push_back(RoiLabel::background());
    }
  }
  return labels;
}

std::vector<AnchorValidity> invalidate_anchors(std::span<const Box> anchors,
                                               std::span<const GroundTruth> gts,
                                               const AreaRange& range) {
  std::vector<const Box*> invalid;
  for (const GroundTruth& gt : gts) {
    if (gt.crowd || !classify_box_validity(gt.box, range)) invalid.push_back(&gt.box);
  }
  std::vector<AnchorValidity> out(anchors.size(), AnchorValidity::train);
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    for (const Box* gt : invalid) {
      if (iou(anchors[i], *gt) > kAnchorInvalidationIou) {
        out[i] = AnchorValidity::invalidated;
        break;
      }
    }
  }
  return out;
}

std::vector<Detection> filter_detections_by_range(std::span<const Detection> dets,
                                                  const AreaRange& range) {
  std::vector<Detection> out;
  for (const Detection& d : dets) {
    if (classify_box_validity(d.box, range)) out.push_back(d);
  }
  return out;
}

}  // namespace scalenorm
