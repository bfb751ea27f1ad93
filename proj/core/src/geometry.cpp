#include "scalenorm/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "scalenorm/error.hpp"

namespace scalenorm {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument:
      return "invalid_argument";
    case ErrorKind::parse:
      return "parse";
    case ErrorKind::structure:
      return "structure";
    case ErrorKind::io:
      return "io";
    case ErrorKind::empty_input:
      return "empty_input";
  }
  return "unknown";
}

double intersection_area(const Box& a, const Box& b) {
  const double w = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double h = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

std::optional<Box> intersection(const Box& a, const Box& b) {
  Box r{std::max(a.x1, b.x1), std::max(a.y1, b.y1), std::min(a.x2, b.x2),
        std::min(a.y2, b.y2)};
  if (r.x2 <= r.x1 || r.y2 <= r.y1) return std::nullopt;
  return r;
}

Box enclosing(const Box& a, const Box& b) {
  return Box{std::min(a.x1, b.x1), std::min(a.y1, b.y1), std::max(a.x2, b.x2),
             std::max(a.y2, b.y2)};
}

double iou(const Box& a, const Box& b) {
  const double inter = intersection_area(a, b);
  if (inter <= 0.0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::min(1.0, inter / uni);
}

bool overlaps(const Box& a, const Box& b) { return intersection_area(a, b) > 0.0; }

Box rescale_box(const Box& b, ImageSize from, ImageSize to) {
  const double fx = static_cast<double>(to.width) / from.width;
  const double fy = static_cast<double>(to.height) / from.height;
  return Box{b.x1 * fx, b.y1 * fy, b.x2 * fx, b.y2 * fy};
}

bool encloses(const Box& outer, const Box& inner) {
  return inner.x1 >= outer.x1 && inner.y1 >= outer.y1 && inner.x2 <= outer.x2 &&
         inner.y2 <= outer.y2;
}

Box clamp_box(const Box& b, ImageSize size) {
  auto cx = [&](double v) { return std::clamp(v, 0.0, static_cast<double>(size.width)); };
  auto cy = [&](double v) { return std::clamp(v, 0.0, static_cast<double>(size.height)); };
  Box r{cx(b.x1), cy(b.y1), cx(b.x2), cy(b.y2)};
  if (r.x2 < r.x1) r.x2 = r.x1;
  if (r.y2 < r.y1) r.y2 = r.y1;
  return r;
}

AreaRange ScaleSpec::effective_range() const {
  AreaRange r = valid_range;
  if (absorb_below) r.min = 0.0;
  if (absorb_above) r.max = std::numeric_limits<double>::infinity();
  return r;
}

namespace {

int scaled_side(int side, double factor) {
  return std::max(1, static_cast<int>(std::floor(side * factor + 0.5)));
}

}  // namespace

ImageSize ScaleSpec::canvas(ImageSize original) const {
  if (const auto* f = std::get_if<ScaleFactor>(&target)) {
    return {scaled_side(original.width, f->value), scaled_side(original.height, f->value)};
  }
  if (const auto* m = std::get_if<MaxSide>(&target)) {
    const double factor =
        static_cast<double>(m->pixels) / std::max(original.width, original.height);
    return {scaled_side(original.width, factor), scaled_side(original.height, factor)};
  }
  return std::get<ImageSize>(target);
}

AreaRange ScaleSpec::canvas_range(ImageSize original) const {
  AreaRange r = effective_range();
  if (range_frame == RangeFrame::resized) return r;
  const ImageSize c = canvas(original);
  const double area_factor = (static_cast<double>(c.width) / original.width) *
                             (static_cast<double>(c.height) / original.height);
  r.min *= area_factor;
  if (!r.unbounded()) r.max *= area_factor;
  return r;
}

void ScaleSpec::validate() const {
  const AreaRange& r = valid_range;
  if (!(r.min >= 0.0) || !(r.min < r.max)) {
    throw invalid_argument("scale " + std::to_string(scale_id) +
                           ": valid range must satisfy 0 <= min < max");
  }
  if (chip_stride < 1 || chip_size < chip_stride) {
    throw invalid_argument("scale " + std::to_string(scale_id) +
                           ": chip size and stride must satisfy size >= stride >= 1");
  }
  if (const auto* f = std::get_if<ScaleFactor>(&target); f && !(f->value > 0.0)) {
    throw invalid_argument("scale " + std::to_string(scale_id) + ": factor must be positive");
  }
  if (const auto* m = std::get_if<MaxSide>(&target); m && m->pixels < 1) {
    throw invalid_argument("scale " + std::to_string(scale_id) + ": max side must be >= 1");
  }
  if (const auto* s = std::get_if<ImageSize>(&target); s && !s->valid()) {
    throw invalid_argument("scale " + std::to_string(scale_id) + ": target size must be >= 1");
  }
}

}  // namespace scalenorm
