#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scalenorm/focus_chips.hpp"
#include "scalenorm/focus_labels.hpp"
#include "scalenorm/geometry.hpp"

namespace scalenorm {

/// Work done at one pyramid level of one image.
struct ScaleWork {
  int scale_id = 0;
  ImageSize canvas;
  std::optional<std::vector<Box>> chips;  // nullopt = full-canvas pass
};

struct ScaleCost {
  int scale_id = 0;
  double processed = 0.0;  // pixels
  double baseline = 0.0;   // full canvas pixels
};

/// Pixels processed versus a full-pyramid pass. For a dataset report the
/// pixel fields are per-image means.
struct CostReport {
  std::vector<ScaleCost> per_scale;
  double processed = 0.0;
  double baseline = 0.0;
  std::size_t images = 1;

  double speedup() const;
  double processed_side() const;  // sqrt of processed pixels
  double baseline_side() const;
};

/// Chip areas are summed without overlap removal: every chip is its own pass.
CostReport pixels_processed(std::span<const ScaleWork> scales);

/// Mean of per-image reports. Per-scale entries are matched by position.
CostReport aggregate(std::span<const CostReport> per_image);

/// Upper-bound speed-up sweep over the minimum chip size.
struct UpperBoundOptions {
  int stride = 16;
  FocusThresholds thresholds;
  int dilation = 3;
  double threshold = 0.5;
  std::vector<int> min_chip_sizes{64, 128, 192, 256, 320, 384, 448, 512};
  unsigned workers = 1;
};

struct SpeedupPoint {
  int min_chip = 0;
  CostReport report;
};

/// Cost of one image when the lowest level runs in full and each higher level
/// only processes FocusChips built from ground-truth FocusPixels of the level
/// below, projected up one level.
CostReport focus_upper_bound_cost(const AnnotatedImage& image, std::span<const ScaleSpec> pyramid,
                                  int stride, const FocusThresholds& thresholds,
                                  const FocusParams& params);

std::vector<SpeedupPoint> speedup_upper_bound(std::span<const AnnotatedImage> images,
                                              std::span<const ScaleSpec> pyramid,
                                              const UpperBoundOptions& options);

/// Distribution of sqrt(box area) / sqrt(image area). Crowd regions skipped.
struct ScaleHistogram {
  std::vector<double> edges;  // bins + 1 entries over [0, 1]
  std::vector<double> mass;   // sums to 1
  std::vector<double> deciles;  // 10%, 20%, ..., 90%
  std::vector<double> sorted_values;

  double decile_ratio() const;  // 90th / 10th percentile
};

ScaleHistogram roi_scale_histogram(std::span<const AnnotatedImage> images, int bins = 20);

struct BandFraction {
  std::string name;
  double min_area = 0.0;  // inclusive
  double max_area = 0.0;  // exclusive
  std::size_t instances = 0;
  double instance_fraction = 0.0;
  double area_fraction = 0.0;
};

struct SizeFractions {
  std::vector<BandFraction> bands;
  double background_area_fraction = 0.0;
  std::size_t instances = 0;
  double image_area = 0.0;
};

/// Instance and area share of each size band. Breakpoints are areas in
/// squared pixels; the default splits small / medium / large at 32^2 and 96^2.
SizeFractions size_area_fractions(std::span<const AnnotatedImage> images,
                                  std::vector<double> breakpoints = {32.0 * 32.0,
                                                                     96.0 * 96.0});

/// Per-level FocusPixel statistics over a dataset.
struct FocusPixelStats {
  int scale_id = 0;
  std::size_t cells = 0;
  std::size_t focus_cells = 0;
  std::size_t dilated_focus_cells = 0;
  double fraction = 0.0;          // focus_cells / cells
  double dilated_fraction = 0.0;  // after dilation
  double mean_focus_area = 0.0;           // canvas pixels per image
  double mean_focus_area_original = 0.0;  // same, original-image pixels
  double mean_canvas_area = 0.0;
};

std::vector<FocusPixelStats> focus_pixel_stats(std::span<const AnnotatedImage> images,
                                               std::span<const ScaleSpec> pyramid, int stride,
                                               const FocusThresholds& thresholds, int dilation,
                                               unsigned workers = 1);

}  // namespace scalenorm
