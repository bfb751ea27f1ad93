#include "scalenorm/focus_stacking.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "scalenorm/error.hpp"
#include "scalenorm/snip_labels.hpp"

namespace scalenorm {

const char* to_string(MergeMode mode) {
  switch (mode) {
    case MergeMode::hard:
      return "hard";
    case MergeMode::soft_gaussian:
      return "soft-gaussian";
    case MergeMode::soft_linear:
      return "soft-linear";
  }
  return "hard";
}

MergeMode merge_mode_from_string(const std::string& s) {
  if (s == "hard") return MergeMode::hard;
  if (s == "soft-gaussian") return MergeMode::soft_gaussian;
  if (s == "soft-linear") return MergeMode::soft_linear;
  throw invalid_argument("unknown merge mode '" + s + "'");
}

void MergePolicy::validate() const {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw invalid_argument("merge policy: iou_threshold must lie in (0, 1)");
  }
  if (!(sigma > 0.0)) throw invalid_argument("merge policy: sigma must be positive");
  if (!(score_floor >= 0.0 && score_floor < 1.0)) {
    throw invalid_argument("merge policy: score_floor must lie in [0, 1)");
  }
}

std::vector<Detection> prune_boundary_detections(std::span<const Detection> dets,
                                                 const Box& chip, ImageSize canvas,
                                                 double epsilon) {
  constexpr double kBorderTol = 1e-9;
  const bool left_border = chip.x1 <= kBorderTol;
  const bool top_border = chip.y1 <= kBorderTol;
  const bool right_border = chip.x2 >= canvas.width - kBorderTol;
  const bool bottom_border = chip.y2 >= canvas.height - kBorderTol;

  std::vector<Detection> kept;
  for (const Detection& d : dets) {
    const Box& b = d.box;
    const bool touches_left = b.x1 <= chip.x1 + epsilon;
    const bool touches_top = b.y1 <= chip.y1 + epsilon;
    const bool touches_right = b.x2 >= chip.x2 - epsilon;
    const bool touches_bottom = b.y2 >= chip.y2 - epsilon;
    const bool discard = (touches_left && !left_border) || (touches_top && !top_border) ||
                         (touches_right && !right_border) ||
                         (touches_bottom && !bottom_border);
    if (!discard) kept.push_back(d);
  }
  return kept;
}

std::vector<Detection> project_to_image(std::span<const Detection> dets, ImageSize canvas,
                                        double origin_x, double origin_y, ImageSize original) {
  std::vector<Detection> out;
  out.reserve(dets.size());
  for (Detection d : dets) {
    const Box shifted{d.box.x1 + origin_x, d.box.y1 + origin_y, d.box.x2 + origin_x,
                      d.box.y2 + origin_y};
    d.box = rescale_box(shifted, canvas, original);
    out.push_back(d);
  }
  return out;
}

namespace {

struct Candidate {
  Detection det;
  std::size_t order;
};

void suppress_class(std::vector<Candidate> items, const MergePolicy& policy,
                    std::vector<Candidate>& out) {
  const bool soft = policy.mode != MergeMode::hard;
  while (!items.empty()) {
    auto best = items.begin();
    for (auto it = items.begin(); it != items.end(); ++it) {
      if (it->det.score > best->det.score ||
          (it->det.score == best->det.score && it->order < best->order)) {
        best = it;
      }
    }
    const Candidate kept = *best;
    items.erase(best);
    if (soft && kept.det.score < policy.score_floor) break;
    out.push_back(kept);

    std::vector<Candidate> rest;
    rest.reserve(items.size());
    for (Candidate& c : items) {
      const double o = iou(kept.det.box, c.det.box);
      switch (policy.mode) {
        case MergeMode::hard:
          if (o > policy.iou_threshold) continue;
          break;
        case MergeMode::soft_gaussian:
          c.det.score *= std::exp(-(o * o) / policy.sigma);
          break;
        case MergeMode::soft_linear:
          if (o > policy.iou_threshold) c.det.score *= 1.0 - o;
          break;
      }
      if (soft && c.det.score < policy.score_floor) continue;
      rest.push_back(std::move(c));
    }
    items = std::move(rest);
  }
}

}  // namespace

std::vector<Detection> merge_detections(std::span<const std::vector<Detection>> per_scale,
                                        const MergePolicy& policy) {
  policy.validate();
  std::map<int, std::vector<Candidate>> by_class;
  std::size_t order = 0;
  for (const auto& list : per_scale) {
    for (const Detection& d : list) by_class[d.class_id].push_back({d, order++});
  }
  std::vector<Candidate> kept;
  for (auto& [cls, items] : by_class) suppress_class(std::move(items), policy, kept);
  std::sort(kept.begin(), kept.end(), [](const Candidate& a, const Candidate& b) {
    if (a.det.score != b.det.score) return a.det.score > b.det.score;
    return a.order < b.order;
  });
  std::vector<Detection> out;
  out.reserve(kept.size());
  for (Candidate& c : kept) out.push_back(std::move(c.det));
  return out;
}

std::vector<Detection> stack_detections(std::span<const ChipDetections> chips,
                                        std::span<const AreaRange> ranges, ImageSize original,
                                        const MergePolicy& policy,
                                        const StackingOptions& options) {
  std::vector<std::vector<Detection>> per_chip;
  for (const ChipDetections& cd : chips) {
    const Box rect = cd.chip.value_or(Box{0.0, 0.0, static_cast<double>(cd.canvas.width),
                                          static_cast<double>(cd.canvas.height)});
    std::vector<Detection> dets;
    for (Detection d : cd.detections) {
      d.box = Box{d.box.x1 + rect.x1, d.box.y1 + rect.y1, d.box.x2 + rect.x1,
                  d.box.y2 + rect.y1};
      d.source = DetectionSource{cd.scale_id, cd.chip};
      dets.push_back(d);
    }
    auto range_step = [&] {
      if (!options.range_filter) return;
      if (cd.scale_id < 0 || static_cast<std::size_t>(cd.scale_id) >= ranges.size()) {
        throw invalid_argument("stack: no valid range for scale " + std::to_string(cd.scale_id));
      }
      dets = filter_detections_by_range(dets, ranges[static_cast<std::size_t>(cd.scale_id)]);
    };
    auto prune_step = [&] {
      if (cd.chip) dets = prune_boundary_detections(dets, rect, cd.canvas, options.boundary_epsilon);
    };
    if (options.prune_before_range) {
      prune_step();
      range_step();
    } else {
      range_step();
      prune_step();
    }
    per_chip.push_back(project_to_image(dets, cd.canvas, 0.0, 0.0, original));
  }
  return merge_detections(per_chip, policy);
}

}  // namespace scalenorm
