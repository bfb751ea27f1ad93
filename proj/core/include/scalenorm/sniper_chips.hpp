#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "scalenorm/geometry.hpp"
#include "scalenorm/snip_labels.hpp"

namespace scalenorm {

enum class ChipKind { positive, negative, focus };

const char* to_string(ChipKind kind);
ChipKind chip_kind_from_string(const std::string& s);

/// Ground truth that partially overlaps a chip, cropped to the chip.
struct CroppedGt {
  int gt_id = 0;
  Box box;  // canvas frame

  friend bool operator==(const CroppedGt&, const CroppedGt&) = default;
};

/// A sub-region of one pyramid level. rect is in that level's canvas frame.
struct Chip {
  long long image_id = 0;
  int scale_id = 0;
  Box rect;
  ChipKind kind = ChipKind::positive;
  std::vector<int> covered_gt_ids;  // ground truths fully enclosed by rect
  std::vector<CroppedGt> cropped_gt;

  friend bool operator==(const Chip&, const Chip&) = default;
};

/// Lattice of candidate K x K chips over a canvas. Origins step by the stride;
/// a final row/column is snapped to the far edge when the stride misses it.
/// A canvas side shorter than K yields one chip clipped to that side.
class ChipGrid {
 public:
  ChipGrid(ImageSize canvas, int chip_size, int chip_stride, int scale_id = 0);

  int scale_id() const { return scale_id_; }
  ImageSize canvas() const { return canvas_; }
  int chip_size() const { return chip_size_; }
  int chip_stride() const { return chip_stride_; }

  std::size_t rows() const { return ys_.size(); }
  std::size_t cols() const { return xs_.size(); }
  std::size_t size() const { return rows() * cols(); }
  const std::vector<int>& x_origins() const { return xs_; }
  const std::vector<int>& y_origins() const { return ys_; }

  Box cell(std::size_t row, std::size_t col) const;
  /// Row-major cell list.
  std::vector<Box> cells() const;

  /// Index interval [first, last] of cells enclosing a box, per axis.
  /// Empty (first > last) when none does.
  struct Span {
    std::size_t first = 1;
    std::size_t last = 0;
    bool empty() const { return first > last; }
  };
  Span cols_enclosing(double x1, double x2) const;
  Span rows_enclosing(double y1, double y2) const;

 private:
  static std::vector<int> origins(int side, int chip_size, int stride);
  static Span enclosing(const std::vector<int>& origins, int side, int chip_size, double lo,
                        double hi);

  int scale_id_;
  ImageSize canvas_;
  int chip_size_;
  int chip_stride_;
  std::vector<int> xs_;
  std::vector<int> ys_;
};

inline ChipGrid build_chip_grid(ImageSize canvas, int chip_size, int chip_stride,
                                int scale_id = 0) {
  return ChipGrid(canvas, chip_size, chip_stride, scale_id);
}

/// A valid ground truth no lattice chip can enclose.
struct UncoverableGt {
  int scale_id = 0;
  int gt_id = 0;
  Box box;  // canvas frame
};

struct PositiveChips {
  std::vector<Chip> chips;
  std::vector<UncoverableGt> too_large;
};

/// Greedy positive chip selection. At each level the chip enclosing the most
/// still-uncovered valid ground truths is taken until every valid ground truth
/// is enclosed. Crowd regions are never valid. Ties go to the smallest
/// (row, col) lattice origin.
PositiveChips select_positive_chips(std::span<const GroundTruth> gts,
                                    std::span<const ScaleSpec> pyramid, ImageSize original);

struct Proposal {
  Box box;
  double score = 1.0;
};

enum class ProposalMembership { center, enclosed };

struct NegativeChipOptions {
  int min_proposals = 2;  // M
  ProposalMembership membership = ProposalMembership::center;
  bool range_filter = true;  // drop proposals outside the level's range first
};

/// Negative chip pool. Per level: drop proposals enclosed by a positive chip
/// of that level, then greedily take chips holding at least M of the rest.
std::vector<Chip> select_negative_chips(std::span<const Proposal> proposals,
                                        std::span<const Chip> positives,
                                        std::span<const ScaleSpec> pyramid, ImageSize original,
                                        const NegativeChipOptions& options = {});

/// Uniform sample of n chips without replacement; pool order is preserved.
std::vector<Chip> sample_negative_chips(std::span<const Chip> pool, std::size_t n,
                                        std::uint64_t seed);

/// Fills covered_gt_ids and cropped_gt from ground truths in the canvas frame.
void annotate_chip(Chip& chip, std::span<const GroundTruth> canvas_gts);

/// Ground truths of a chip in chip-local coordinates: enclosed ones plus the
/// cropped fragments. Valid and invalid alike.
std::vector<GroundTruth> chip_local_gts(const Chip& chip,
                                        std::span<const GroundTruth> canvas_gts);

/// Labels for proposals inside a chip, all in chip-local coordinates.
/// Ground truths are not range-filtered; proposals are.
std::vector<RoiLabel> assign_chip_labels(std::span<const Box> proposals,
                                         std::span<const GroundTruth> gts_in_chip,
                                         const AreaRange& range);

/// Ground truths rescaled from the original frame to a canvas.
std::vector<GroundTruth> rescale_gts(std::span<const GroundTruth> gts, ImageSize original,
                                     ImageSize canvas);

}  // namespace scalenorm
