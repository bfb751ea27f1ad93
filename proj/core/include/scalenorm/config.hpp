#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scalenorm/focus_chips.hpp"
#include "scalenorm/focus_labels.hpp"
#include "scalenorm/focus_stacking.hpp"
#include "scalenorm/geometry.hpp"
#include "scalenorm/sniper_chips.hpp"

namespace scalenorm {

struct SniperConfig {
  int min_proposals = 2;        // M
  int negatives_per_image = 2;
  std::uint64_t seed = 0;
  ProposalMembership membership = ProposalMembership::center;
  bool range_filter_proposals = true;
};

struct AutofocusConfig {
  int stride = 16;
  FocusThresholds thresholds;
  // focus[i] turns the map of level i into chips for level i + 1.
  std::vector<FocusParams> focus;
  int stats_dilation = 3;
  int upper_bound_dilation = 3;
  std::vector<int> upper_bound_min_chips{64, 128, 192, 256, 320, 384, 448, 512};
};

struct PipelineConfig {
  std::string profile;
  std::vector<ScaleSpec> pyramid;  // increasing resolution
  SniperConfig sniper;
  AutofocusConfig autofocus;
  MergePolicy merge;
  StackingOptions stacking;

  NegativeChipOptions negative_options() const;
  /// Focus params for the map at level i; falls back to the last entry.
  FocusParams focus_params(std::size_t level) const;
};

/// Three-level COCO setup: longest side 512, x1.667, x3; chips 512 / stride 32;
/// valid ranges (120^2, inf), (32^2, 150^2), (0, 80^2) on the original image.
PipelineConfig coco_default();

/// Known profile names: "coco-default".
PipelineConfig profile(const std::string& name);
std::vector<std::string> profile_names();

/// Reads a config document. A "profile" key selects a base profile; fields
/// present in the document override it one by one. A "pyramid" array
/// overrides the base levels position by position and sets the level count.
PipelineConfig parse_config(const nlohmann::json& doc);
nlohmann::json to_json(const PipelineConfig& config);

PipelineConfig load_config(const std::string& path);

struct ConfigIssues {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

/// Invariant check. Errors for broken invariants; warnings for gaps between
/// consecutive valid ranges (measured on a 640x480 reference image).
ConfigIssues check_config(const PipelineConfig& config);

}  // namespace scalenorm
