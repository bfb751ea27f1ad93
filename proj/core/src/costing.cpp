#include "scalenorm/costing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "scalenorm/error.hpp"
#include "scalenorm/parallel.hpp"
#include "scalenorm/sniper_chips.hpp"

namespace scalenorm {

unsigned default_workers() {
  if (const char* env = std::getenv("SCALENORM_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

double CostReport::speedup() const {
  if (processed <= 0.0) return std::numeric_limits<double>::infinity();
  return baseline / processed;
}

double CostReport::processed_side() const { return std::sqrt(processed); }
double CostReport::baseline_side() const { return std::sqrt(baseline); }

CostReport pixels_processed(std::span<const ScaleWork> scales) {
  CostReport report;
  for (const ScaleWork& w : scales) {
    ScaleCost cost{w.scale_id, 0.0, static_cast<double>(w.canvas.area())};
    if (!w.chips) {
      cost.processed = cost.baseline;
    } else {
      for (const Box& c : *w.chips) cost.processed += clamp_box(c, w.canvas).area();
    }
    report.processed += cost.processed;
    report.baseline += cost.baseline;
    report.per_scale.push_back(cost);
  }
  return report;
}

CostReport aggregate(std::span<const CostReport> per_image) {
  if (per_image.empty()) throw Error(ErrorKind::empty_input, "cost aggregate: no images");
  CostReport out;
  out.images = 0;
  for (const CostReport& r : per_image) {
    if (out.per_scale.size() < r.per_scale.size()) out.per_scale.resize(r.per_scale.size());
    for (std::size_t i = 0; i < r.per_scale.size(); ++i) {
      out.per_scale[i].scale_id = r.per_scale[i].scale_id;
      out.per_scale[i].processed += r.per_scale[i].processed;
      out.per_scale[i].baseline += r.per_scale[i].baseline;
    }
    out.processed += r.processed;
    out.baseline += r.baseline;
    out.images += r.images;
  }
  const double n = static_cast<double>(per_image.size());
  for (ScaleCost& c : out.per_scale) {
    c.processed /= n;
    c.baseline /= n;
  }
  out.processed /= n;
  out.baseline /= n;
  return out;
}

namespace {

std::vector<ScaleWork> upper_bound_work(std::span<const ImageSize> canvases,
                                        std::span<const ScaleSpec> pyramid,
                                        std::span<const ProbabilityMap> maps,
                                        const FocusParams& params) {
  std::vector<ScaleWork> work;
  for (std::size_t i = 0; i < pyramid.size(); ++i) {
    ScaleWork w{pyramid[i].scale_id, canvases[i], std::nullopt};
    if (i > 0) {
      std::vector<Box> chips;
      for (const Box& c : generate_focus_chips(maps[i - 1], params, canvases[i - 1])) {
        chips.push_back(clamp_box(rescale_box(c, canvases[i - 1], canvases[i]), canvases[i]));
      }
      w.chips = std::move(chips);
    }
    work.push_back(std::move(w));
  }
  return work;
}

struct LevelMaps {
  std::vector<ImageSize> canvases;
  std::vector<ProbabilityMap> maps;  // ground-truth focus probability per level
};

LevelMaps level_maps(const AnnotatedImage& image, std::span<const ScaleSpec> pyramid, int stride,
                     const FocusThresholds& thresholds) {
  LevelMaps lm;
  for (const ScaleSpec& spec : pyramid) {
    const ImageSize canvas = spec.canvas(image.size);
    const auto gts = rescale_gts(image.gts, image.size, canvas);
    lm.canvases.push_back(canvas);
    lm.maps.push_back(focus_probability(build_focus_label_map(gts, canvas, stride, thresholds)));
  }
  return lm;
}

}  // namespace

CostReport focus_upper_bound_cost(const AnnotatedImage& image, std::span<const ScaleSpec> pyramid,
                                  int stride, const FocusThresholds& thresholds,
                                  const FocusParams& params) {
  const LevelMaps lm = level_maps(image, pyramid, stride, thresholds);
  return pixels_processed(upper_bound_work(lm.canvases, pyramid, lm.maps, params));
}

std::vector<SpeedupPoint> speedup_upper_bound(std::span<const AnnotatedImage> images,
                                              std::span<const ScaleSpec> pyramid,
                                              const UpperBoundOptions& options) {
  if (images.empty()) throw Error(ErrorKind::empty_input, "speedup: dataset has no images");
  if (pyramid.empty()) throw invalid_argument("speedup: pyramid is empty");
  const std::size_t nk = options.min_chip_sizes.size();
  // reports[image][k]
  auto reports = parallel_map<std::vector<CostReport>>(
      images.size(), options.workers, [&](std::size_t i) {
        const LevelMaps lm = level_maps(images[i], pyramid, options.stride, options.thresholds);
        std::vector<CostReport> per_k;
        for (int k : options.min_chip_sizes) {
          const FocusParams params{options.threshold, options.dilation, k, false};
          per_k.push_back(pixels_processed(upper_bound_work(lm.canvases, pyramid, lm.maps, params)));
        }
        return per_k;
      });
  std::vector<SpeedupPoint> curve;
  for (std::size_t k = 0; k < nk; ++k) {
    std::vector<CostReport> column;
    column.reserve(images.size());
    for (const auto& per_k : reports) column.push_back(per_k[k]);
    curve.push_back(SpeedupPoint{options.min_chip_sizes[k], aggregate(column)});
  }
  return curve;
}

namespace {

double percentile(const std::vector<double>& sorted, double q) {
  // Linear interpolation between closest ranks.
  if (sorted.size() == 1) return sorted.front();
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

double ScaleHistogram::decile_ratio() const {
  if (deciles.size() != 9 || deciles.front() <= 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return deciles.back() / deciles.front();
}

ScaleHistogram roi_scale_histogram(std::span<const AnnotatedImage> images, int bins) {
  if (bins < 1) throw invalid_argument("histogram: bins must be >= 1");
  ScaleHistogram h;
  for (const AnnotatedImage& img : images) {
    const double image_area = static_cast<double>(img.size.area());
    for (const GroundTruth& gt : img.gts) {
      if (gt.crowd) continue;
      h.sorted_values.push_back(std::sqrt(std::max(0.0, gt.box.area()) / image_area));
    }
  }
  if (h.sorted_values.empty()) {
    throw Error(ErrorKind::empty_input, "histogram: dataset has no annotations");
  }
  std::sort(h.sorted_values.begin(), h.sorted_values.end());
  h.edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int i = 0; i <= bins; ++i) h.edges[static_cast<std::size_t>(i)] = static_cast<double>(i) / bins;
  h.mass.assign(static_cast<std::size_t>(bins), 0.0);
  const double unit = 1.0 / static_cast<double>(h.sorted_values.size());
  for (double v : h.sorted_values) {
    const int bin = std::clamp(static_cast<int>(std::floor(v * bins)), 0, bins - 1);
    h.mass[static_cast<std::size_t>(bin)] += unit;
  }
  for (int q = 1; q <= 9; ++q) h.deciles.push_back(percentile(h.sorted_values, q / 10.0));
  return h;
}

SizeFractions size_area_fractions(std::span<const AnnotatedImage> images,
                                  std::vector<double> breakpoints) {
  if (images.empty()) throw Error(ErrorKind::empty_input, "size fractions: no images");
  std::sort(breakpoints.begin(), breakpoints.end());
  static const char* kNames[] = {"small", "medium", "large"};
  SizeFractions out;
  const std::size_t nbands = breakpoints.size() + 1;
  for (std::size_t i = 0; i < nbands; ++i) {
    BandFraction b;
    b.name = (nbands == 3) ? kNames[i] : "band" + std::to_string(i);
    b.min_area = i == 0 ? 0.0 : breakpoints[i - 1];
    b.max_area = i + 1 == nbands ? std::numeric_limits<double>::infinity() : breakpoints[i];
    out.bands.push_back(b);
  }
  std::vector<double> band_area(nbands, 0.0);
  for (const AnnotatedImage& img : images) {
    out.image_area += static_cast<double>(img.size.area());
    for (const GroundTruth& gt : img.gts) {
      if (gt.crowd) continue;
      const double area = std::max(0.0, gt.box.area());
      const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), area);
      const auto band = static_cast<std::size_t>(it - breakpoints.begin());
      out.bands[band].instances += 1;
      band_area[band] += area;
      out.instances += 1;
    }
  }
  double covered = 0.0;
  for (std::size_t i = 0; i < nbands; ++i) {
    BandFraction& b = out.bands[i];
    b.instance_fraction =
        out.instances ? static_cast<double>(b.instances) / static_cast<double>(out.instances) : 0.0;
    b.area_fraction = band_area[i] / out.image_area;
    covered += b.area_fraction;
  }
  out.background_area_fraction = 1.0 - covered;
  return out;
}

std::vector<FocusPixelStats> focus_pixel_stats(std::span<const AnnotatedImage> images,
                                               std::span<const ScaleSpec> pyramid, int stride,
                                               const FocusThresholds& thresholds, int dilation,
                                               unsigned workers) {
  if (images.empty()) throw Error(ErrorKind::empty_input, "focus stats: dataset has no images");
  struct PerImage {
    std::size_t cells = 0, focus = 0, dilated = 0;
    double focus_area = 0.0, focus_area_original = 0.0, canvas_area = 0.0;
  };
  std::vector<FocusPixelStats> out;
  for (const ScaleSpec& spec : pyramid) {
    const auto per_image = parallel_map<PerImage>(images.size(), workers, [&](std::size_t i) {
      const AnnotatedImage& img = images[i];
      const ImageSize canvas = spec.canvas(img.size);
      const auto gts = rescale_gts(img.gts, img.size, canvas);
      const LabelMap labels = build_focus_label_map(gts, canvas, stride, thresholds);
      const BinaryMap focus = focus_cells(labels);
      const BinaryMap grown = dilate(focus, dilation);
      PerImage r;
      r.cells = focus.size();
      const Box canvas_box{0.0, 0.0, static_cast<double>(canvas.width),
                           static_cast<double>(canvas.height)};
      for (int row = 0; row < focus.height(); ++row) {
        for (int col = 0; col < focus.width(); ++col) {
          if (grown.at(row, col)) ++r.dilated;
          if (!focus.at(row, col)) continue;
          ++r.focus;
          r.focus_area += intersection_area(focus.block(row, col), canvas_box);
        }
      }
      const double area_factor = (static_cast<double>(canvas.width) / img.size.width) *
                                 (static_cast<double>(canvas.height) / img.size.height);
      r.focus_area_original = r.focus_area / area_factor;
      r.canvas_area = static_cast<double>(canvas.area());
      return r;
    });
    FocusPixelStats s;
    s.scale_id = spec.scale_id;
    for (const PerImage& r : per_image) {
      s.cells += r.cells;
      s.focus_cells += r.focus;
      s.dilated_focus_cells += r.dilated;
      s.mean_focus_area += r.focus_area;
      s.mean_focus_area_original += r.focus_area_original;
      s.mean_canvas_area += r.canvas_area;
    }
    const double n = static_cast<double>(images.size());
    s.fraction = static_cast<double>(s.focus_cells) / static_cast<double>(s.cells);
    s.dilated_fraction = static_cast<double>(s.dilated_focus_cells) / static_cast<double>(s.cells);
    s.mean_focus_area /= n;
    s.mean_focus_area_original /= n;
    s.mean_canvas_area /= n;
    out.push_back(s);
  }
  return out;
}

}  // namespace scalenorm
