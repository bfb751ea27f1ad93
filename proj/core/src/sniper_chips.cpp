#include "scalenorm/sniper_chips.hpp"

#include <algorithm>
#include <random>

#include "scalenorm/error.hpp"

namespace scalenorm {

const char* to_string(ChipKind kind) {
  switch (kind) {
    case ChipKind::positive:
      return "positive";
    case ChipKind::negative:
      return "negative";
    case ChipKind::focus:
      return "focus";
  }
  return "positive";
}

ChipKind chip_kind_from_string(const std::string& s) {
  if (s == "positive") return ChipKind::positive;
  if (s == "negative") return ChipKind::negative;
  if (s == "focus") return ChipKind::focus;
  throw Error(ErrorKind::parse, "unknown chip kind '" + s + "'");
}

ChipGrid::ChipGrid(ImageSize canvas, int chip_size, int chip_stride, int scale_id)
    : scale_id_(scale_id), canvas_(canvas), chip_size_(chip_size), chip_stride_(chip_stride) {
  if (!canvas.valid()) throw invalid_argument("chip grid: canvas must be at least 1x1");
  if (chip_size < 1 || chip_stride < 1) {
    throw invalid_argument("chip grid: chip size and stride must be >= 1");
  }
  xs_ = origins(canvas.width, chip_size, chip_stride);
  ys_ = origins(canvas.height, chip_size, chip_stride);
}

std::vector<int> ChipGrid::origins(int side, int chip_size, int stride) {
  if (side <= chip_size) return {0};
  std::vector<int> out;
  for (int o = 0; o + chip_size <= side; o += stride) out.push_back(o);
  if (out.back() + chip_size < side) out.push_back(side - chip_size);
  return out;
}

Box ChipGrid::cell(std::size_t row, std::size_t col) const {
  const int x = xs_[col];
  const int y = ys_[row];
  return Box{static_cast<double>(x), static_cast<double>(y),
             static_cast<double>(std::min(x + chip_size_, canvas_.width)),
             static_cast<double>(std::min(y + chip_size_, canvas_.height))};
}

std::vector<Box> ChipGrid::cells() const {
  std::vector<Box> out;
  out.reserve(size());
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t c = 0; c < cols(); ++c) out.push_back(cell(r, c));
  }
  return out;
}

ChipGrid::Span ChipGrid::enclosing(const std::vector<int>& origins, int side, int chip_size,
                                   double lo, double hi) {
  // Origins and clipped ends are both non-decreasing, so the enclosing cells
  // form one contiguous run.
  auto end_of = [&](int o) { return static_cast<double>(std::min(o + chip_size, side)); };
  const auto first = std::partition_point(origins.begin(), origins.end(),
                                          [&](int o) { return end_of(o) < hi; });
  const auto past_last = std::partition_point(
      origins.begin(), origins.end(), [&](int o) { return static_cast<double>(o) <= lo; });
  Span s;
  s.first = static_cast<std::size_t>(first - origins.begin());
  if (past_last == origins.begin()) return Span{};
  s.last = static_cast<std::size_t>(past_last - origins.begin()) - 1;
  if (s.first > s.last) return Span{};
  return s;
}

ChipGrid::Span ChipGrid::cols_enclosing(double x1, double x2) const {
  return enclosing(xs_, canvas_.width, chip_size_, x1, x2);
}

ChipGrid::Span ChipGrid::rows_enclosing(double y1, double y2) const {
  return enclosing(ys_, canvas_.height, chip_size_, y1, y2);
}

namespace {

struct CellBlock {
  ChipGrid::Span rows;
  ChipGrid::Span cols;
};

struct BestCell {
  std::size_t index = 0;
  int count = 0;
};

// Cell (row-major, first wins ties) covering the most active blocks, skipping
// taken cells. Counts come from a 2-D difference array over the lattice.
BestCell best_cell(const ChipGrid& grid, std::span<const CellBlock> blocks,
                   std::span<const char> active, std::span<const char> taken) {
  const std::size_t rows = grid.rows();
  const std::size_t cols = grid.cols();
  std::vector<int> diff((rows + 1) * (cols + 1), 0);
  auto at = [&](std::size_t r, std::size_t c) -> int& { return diff[r * (cols + 1) + c]; };
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (!active[i]) continue;
    const CellBlock& b = blocks[i];
    at(b.rows.first, b.cols.first) += 1;
    at(b.rows.first, b.cols.last + 1) -= 1;
    at(b.rows.last + 1, b.cols.first) -= 1;
    at(b.rows.last + 1, b.cols.last + 1) += 1;
  }
  BestCell best;
  std::vector<int> running(cols + 1, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    int row_acc = 0;
    for (std::size_t c = 0; c < cols; ++c) {
      row_acc += at(r, c);
      running[c] += row_acc;
      const std::size_t idx = r * cols + c;
      if (!taken[idx] && running[c] > best.count) {
        best.count = running[c];
        best.index = idx;
      }
    }
  }
  return best;
}

std::vector<Chip> chips_at_level(const ChipGrid& grid, std::span<const CellBlock> blocks,
                                 std::vector<char>& active, int min_count) {
  std::vector<char> taken(grid.size(), 0);
  std::vector<Chip> out;
  while (std::any_of(active.begin(), active.end(), [](char a) { return a != 0; })) {
    const BestCell best = best_cell(grid, blocks, active, taken);
    if (best.count < std::max(1, min_count)) break;
    taken[best.index] = 1;
    const std::size_t row = best.index / grid.cols();
    const std::size_t col = best.index % grid.cols();
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const CellBlock& b = blocks[i];
      if (active[i] && row >= b.rows.first && row <= b.rows.last && col >= b.cols.first &&
          col <= b.cols.last) {
        active[i] = 0;
      }
    }
    Chip chip;
    chip.scale_id = grid.scale_id();
    chip.rect = grid.cell(row, col);
    out.push_back(std::move(chip));
  }
  return out;
}

}  // namespace

std::vector<GroundTruth> rescale_gts(std::span<const GroundTruth> gts, ImageSize original,
                                     ImageSize canvas) {
  std::vector<GroundTruth> out(gts.begin(), gts.end());
  for (GroundTruth& gt : out) gt.box = rescale_box(gt.box, original, canvas);
  return out;
}

void annotate_chip(Chip& chip, std::span<const GroundTruth> canvas_gts) {
  chip.covered_gt_ids.clear();
  chip.cropped_gt.clear();
  for (std::size_t i = 0; i < canvas_gts.size(); ++i) {
    const Box& b = canvas_gts[i].box;
    if (encloses(chip.rect, b)) {
      chip.covered_gt_ids.push_back(static_cast<int>(i));
    } else if (auto cut = intersection(chip.rect, b)) {
      chip.cropped_gt.push_back(CroppedGt{static_cast<int>(i), *cut});
    }
  }
}

PositiveChips select_positive_chips(std::span<const GroundTruth> gts,
                                    std::span<const ScaleSpec> pyramid, ImageSize original) {
  if (!original.valid()) throw invalid_argument("positive chips: invalid image size");
  PositiveChips result;
  for (const ScaleSpec& spec : pyramid) {
    spec.validate();
    const ImageSize canvas = spec.canvas(original);
    const AreaRange range = spec.canvas_range(original);
    const std::vector<GroundTruth> scaled = rescale_gts(gts, original, canvas);
    const ChipGrid grid(canvas, spec.chip_size, spec.chip_stride, spec.scale_id);

    std::vector<CellBlock> blocks;
    std::vector<char> active;
    for (std::size_t i = 0; i < scaled.size(); ++i) {
      const GroundTruth& gt = scaled[i];
      if (gt.crowd || !classify_box_validity(gt.box, range)) continue;
      CellBlock b{grid.rows_enclosing(gt.box.y1, gt.box.y2),
                  grid.cols_enclosing(gt.box.x1, gt.box.x2)};
      if (b.rows.empty() || b.cols.empty()) {
        result.too_large.push_back(UncoverableGt{spec.scale_id, static_cast<int>(i), gt.box});
        continue;
      }
      blocks.push_back(b);
      active.push_back(1);
    }
    for (Chip& chip : chips_at_level(grid, blocks, active, 1)) {
      chip.kind = ChipKind::positive;
      annotate_chip(chip, scaled);
      result.chips.push_back(std::move(chip));
    }
  }
  return result;
}

std::vector<Chip> select_negative_chips(std::span<const Proposal> proposals,
                                        std::span<const Chip> positives,
                                        std::span<const ScaleSpec> pyramid, ImageSize original,
                                        const NegativeChipOptions& options) {
  if (!original.valid()) throw invalid_argument("negative chips: invalid image size");
  if (options.min_proposals < 1) throw invalid_argument("negative chips: M must be >= 1");
  std::vector<Chip> pool;
  if (proposals.empty()) return pool;
  for (const ScaleSpec& spec : pyramid) {
    spec.validate();
    const ImageSize canvas = spec.canvas(original);
    const AreaRange range = spec.canvas_range(original);
    const ChipGrid grid(canvas, spec.chip_size, spec.chip_stride, spec.scale_id);

    std::vector<CellBlock> blocks;
    std::vector<char> active;
    for (const Proposal& p : proposals) {
      const Box b = rescale_box(p.box, original, canvas);
      if (options.range_filter && !classify_box_validity(b, range)) continue;
      const bool inside_positive =
          std::any_of(positives.begin(), positives.end(), [&](const Chip& c) {
            return c.scale_id == spec.scale_id && encloses(c.rect, b);
          });
      if (inside_positive) continue;
      CellBlock block;
      if (options.membership == ProposalMembership::center) {
        block = {grid.rows_enclosing(b.center_y(), b.center_y()),
                 grid.cols_enclosing(b.center_x(), b.center_x())};
      } else {
        block = {grid.rows_enclosing(b.y1, b.y2), grid.cols_enclosing(b.x1, b.x2)};
      }
      if (block.rows.empty() || block.cols.empty()) continue;
      blocks.push_back(block);
      active.push_back(1);
    }
    for (Chip& chip : chips_at_level(grid, blocks, active, options.min_proposals)) {
      chip.kind = ChipKind::negative;
      pool.push_back(std::move(chip));
    }
  }
  return pool;
}

std::vector<Chip> sample_negative_chips(std::span<const Chip> pool, std::size_t n,
                                        std::uint64_t seed) {
  if (pool.size() <= n) return {pool.begin(), pool.end()};
  std::vector<Chip> out;
  out.reserve(n);
  std::mt19937_64 rng(seed);
  std::sample(pool.begin(), pool.end(), std::back_inserter(out), n, rng);
  return out;
}

std::vector<GroundTruth> chip_local_gts(const Chip& chip,
                                        std::span<const GroundTruth> canvas_gts) {
  std::vector<GroundTruth> out;
  auto to_local = [&](Box b) {
    return Box{b.x1 - chip.rect.x1, b.y1 - chip.rect.y1, b.x2 - chip.rect.x1,
               b.y2 - chip.rect.y1};
  };
  for (int id : chip.covered_gt_ids) {
    GroundTruth gt = canvas_gts[static_cast<std::size_t>(id)];
    gt.box = to_local(gt.box);
    out.push_back(gt);
  }
  for (const CroppedGt& c : chip.cropped_gt) {
    GroundTruth gt = canvas_gts[static_cast<std::size_t>(c.gt_id)];
    gt.box = to_local(c.box);
    out.push_back(gt);
  }
  return out;
}

std::vector<RoiLabel> assign_chip_labels(std::span<const Box> proposals,
                                         std::span<const GroundTruth> gts_in_chip,
                                         const AreaRange& range) {
  return assign_roi_labels(proposals, gts_in_chip, range);
}

}  // namespace scalenorm
