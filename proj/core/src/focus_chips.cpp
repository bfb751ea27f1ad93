#include "scalenorm/focus_chips.hpp"

#include <algorithm>
#include <tuple>
#include <utility>

#include "scalenorm/error.hpp"

namespace scalenorm {

void FocusParams::validate() const {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw invalid_argument("focus params: threshold must lie in [0, 1]");
  }
  if (dilation < 1 || dilation % 2 == 0) {
    throw invalid_argument("focus params: dilation must be odd and >= 1");
  }
  if (min_chip < 1) throw invalid_argument("focus params: minimum chip size must be >= 1");
}

BinaryMap threshold_map(const ProbabilityMap& p, double t, bool strict) {
  BinaryMap out(p.width(), p.height(), p.stride(), 0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double v = p.cells()[i];
    out.cells()[i] = strict ? (v > t) : (v >= t);
  }
  return out;
}

BinaryMap dilate(const BinaryMap& map, int d) {
  if (d < 1 || d % 2 == 0) throw invalid_argument("dilate: kernel size must be odd and >= 1");
  const int h = d / 2;
  const int w = map.width();
  const int ht = map.height();
  // Separable: a square max filter is a row pass followed by a column pass.
  BinaryMap rows(w, ht, map.stride(), 0);
  for (int r = 0; r < ht; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!map.at(r, c)) continue;
      for (int cc = std::max(0, c - h); cc <= std::min(w - 1, c + h); ++cc) rows.at(r, cc) = 1;
    }
  }
  BinaryMap out(w, ht, map.stride(), 0);
  for (int r = 0; r < ht; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!rows.at(r, c)) continue;
      for (int rr = std::max(0, r - h); rr <= std::min(ht - 1, r + h); ++rr) out.at(rr, c) = 1;
    }
  }
  return out;
}

std::vector<Component> connected_components(const BinaryMap& map) {
  const int w = map.width();
  const int h = map.height();
  std::vector<char> seen(map.size(), 0);
  std::vector<Component> out;
  std::vector<int> stack;
  for (int start = 0; start < static_cast<int>(map.size()); ++start) {
    if (!map.cells()[start] || seen[start]) continue;
    Component comp;
    comp.row_min = comp.row_max = start / w;
    comp.col_min = comp.col_max = start % w;
    seen[start] = 1;
    stack.push_back(start);
    while (!stack.empty()) {
      const int idx = stack.back();
      stack.pop_back();
      comp.cells.push_back(idx);
      const int r = idx / w;
      const int c = idx % w;
      comp.row_min = std::min(comp.row_min, r);
      comp.row_max = std::max(comp.row_max, r);
      comp.col_min = std::min(comp.col_min, c);
      comp.col_max = std::max(comp.col_max, c);
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const int nr = r + dr;
          const int nc = c + dc;
          if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
          const int n = nr * w + nc;
          if (map.cells()[n] && !seen[n]) {
            seen[n] = 1;
            stack.push_back(n);
          }
        }
      }
    }
    std::sort(comp.cells.begin(), comp.cells.end());
    out.push_back(std::move(comp));
  }
  return out;
}

namespace {

std::pair<double, double> expand_axis(double lo, double hi, int min_side, int limit) {
  const double len = hi - lo;
  if (len < min_side) {
    const double grow = 0.5 * (min_side - len);
    lo -= grow;
    hi += grow;
  }
  if (hi - lo >= limit) return {0.0, static_cast<double>(limit)};
  if (lo < 0.0) {
    hi -= lo;
    lo = 0.0;
  }
  if (hi > limit) {
    lo -= hi - limit;
    hi = limit;
  }
  return {lo, hi};
}

}  // namespace

Box expand_to_min_size(const Box& b, int min_side, ImageSize image) {
  const auto [x1, x2] = expand_axis(b.x1, b.x2, min_side, image.width);
  const auto [y1, y2] = expand_axis(b.y1, b.y2, min_side, image.height);
  return Box{x1, y1, x2, y2};
}

std::vector<Box> merge_overlapping(std::vector<Box> boxes) {
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i < boxes.size() && !merged; ++i) {
      for (std::size_t j = i + 1; j < boxes.size(); ++j) {
        if (overlaps(boxes[i], boxes[j])) {
          boxes[i] = enclosing(boxes[i], boxes[j]);
          boxes.erase(boxes.begin() + static_cast<std::ptrdiff_t>(j));
          merged = true;
          break;
        }
      }
    }
  }
  std::sort(boxes.begin(), boxes.end(), [](const Box& a, const Box& b) {
    return std::tie(a.y1, a.x1, a.y2, a.x2) < std::tie(b.y1, b.x1, b.y2, b.x2);
  });
  return boxes;
}

std::vector<Box> generate_focus_chips(const ProbabilityMap& p, const FocusParams& params,
                                      ImageSize image) {
  params.validate();
  const int s = p.stride();
  if (s < 1 || p.width() != (image.width + s - 1) / s ||
      p.height() != (image.height + s - 1) / s) {
    throw invalid_argument("focus chips: probability map geometry does not match the image");
  }
  const BinaryMap dilated = dilate(threshold_map(p, params.threshold, params.strict_threshold),
                                   params.dilation);
  std::vector<Box> chips;
  for (const Component& comp : connected_components(dilated)) {
    Box rect{static_cast<double>(comp.col_min) * s, static_cast<double>(comp.row_min) * s,
             static_cast<double>(comp.col_max + 1) * s,
             static_cast<double>(comp.row_max + 1) * s};
    rect = clamp_box(rect, image);
    chips.push_back(expand_to_min_size(rect, params.min_chip, image));
  }
  chips = merge_overlapping(std::move(chips));
  // Merged boxes already meet the minimum; the re-check is idempotent.
  for (Box& c : chips) c = expand_to_min_size(c, params.min_chip, image);
  return chips;
}

}  // namespace scalenorm
