#include "scalenorm/config.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "scalenorm/dataset.hpp"
#include "scalenorm/error.hpp"

namespace scalenorm {

using nlohmann::json;

NegativeChipOptions PipelineConfig::negative_options() const {
  return NegativeChipOptions{sniper.min_proposals, sniper.membership,
                             sniper.range_filter_proposals};
}

FocusParams PipelineConfig::focus_params(std::size_t level) const {
  if (autofocus.focus.empty()) return FocusParams{};
  return autofocus.focus[std::min(level, autofocus.focus.size() - 1)];
}

PipelineConfig coco_default() {
  PipelineConfig c;
  c.profile = "coco-default";
  const double inf = std::numeric_limits<double>::infinity();
  ScaleSpec low;
  low.scale_id = 0;
  low.target = MaxSide{512};
  low.valid_range = {120.0 * 120.0, inf};
  low.absorb_above = true;
  ScaleSpec mid;
  mid.scale_id = 1;
  mid.target = ScaleFactor{1.667};
  mid.valid_range = {32.0 * 32.0, 150.0 * 150.0};
  ScaleSpec high;
  high.scale_id = 2;
  high.target = ScaleFactor{3.0};
  high.valid_range = {0.0, 80.0 * 80.0};
  high.absorb_below = true;
  for (ScaleSpec* s : {&low, &mid, &high}) {
    s->range_frame = RangeFrame::original;
    s->chip_size = 512;
    s->chip_stride = 32;
    c.pyramid.push_back(*s);
  }
  c.autofocus.focus = {FocusParams{0.5, 3, 128, false}, FocusParams{0.5, 3, 128, false}};
  return c;
}

std::vector<std::string> profile_names() { return {"coco-default"}; }

PipelineConfig profile(const std::string& name) {
  if (name == "coco-default") return coco_default();
  throw invalid_argument("unknown profile '" + name + "'");
}

namespace {

[[noreturn]] void bad(const std::string& pointer, const std::string& message) {
  throw Error(ErrorKind::structure, message, pointer);
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& pointer) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    bad(pointer + "/" + key, e.what());
  }
}

json range_max_to_json(double v) { return std::isinf(v) ? json(nullptr) : json(v); }

ScaleSpec parse_scale(const json& j, int index, const ScaleSpec& defaults,
                      const std::string& pointer) {
  if (!j.is_object()) bad(pointer, "scale entry must be an object");
  ScaleSpec s = defaults;
  s.scale_id = index;
  read(j, "scale_id", s.scale_id, pointer);
  if (j.contains("target")) {
    const json& t = j["target"];
    if (t.contains("factor")) {
      s.target = ScaleFactor{t["factor"].get<double>()};
    } else if (t.contains("max_side")) {
      s.target = MaxSide{t["max_side"].get<int>()};
    } else if (t.contains("width") && t.contains("height")) {
      s.target = ImageSize{t["width"].get<int>(), t["height"].get<int>()};
    } else {
      bad(pointer + "/target", "target needs 'factor', 'max_side' or 'width'+'height'");
    }
  }
  if (j.contains("valid_range")) {
    const json& r = j["valid_range"];
    if (!r.is_array() || r.size() != 2 || !r[0].is_number()) {
      bad(pointer + "/valid_range", "valid_range must be [min, max|null]");
    }
    s.valid_range.min = r[0].get<double>();
    s.valid_range.max =
        r[1].is_null() ? std::numeric_limits<double>::infinity() : r[1].get<double>();
  }
  if (j.contains("range_frame")) {
    const std::string f = j["range_frame"].get<std::string>();
    if (f == "original") {
      s.range_frame = RangeFrame::original;
    } else if (f == "resized") {
      s.range_frame = RangeFrame::resized;
    } else {
      bad(pointer + "/range_frame", "range_frame must be 'original' or 'resized'");
    }
  }
  read(j, "chip_size", s.chip_size, pointer);
  read(j, "chip_stride", s.chip_stride, pointer);
  read(j, "absorb_below", s.absorb_below, pointer);
  read(j, "absorb_above", s.absorb_above, pointer);
  return s;
}

json scale_to_json(const ScaleSpec& s) {
  json target;
  if (const auto* f = std::get_if<ScaleFactor>(&s.target)) {
    target = {{"factor", f->value}};
  } else if (const auto* m = std::get_if<MaxSide>(&s.target)) {
    target = {{"max_side", m->pixels}};
  } else {
    const auto& sz = std::get<ImageSize>(s.target);
    target = {{"width", sz.width}, {"height", sz.height}};
  }
  return {{"scale_id", s.scale_id},
          {"target", target},
          {"valid_range", {s.valid_range.min, range_max_to_json(s.valid_range.max)}},
          {"range_frame", s.range_frame == RangeFrame::original ? "original" : "resized"},
          {"chip_size", s.chip_size},
          {"chip_stride", s.chip_stride},
          {"absorb_below", s.absorb_below},
          {"absorb_above", s.absorb_above}};
}

FocusParams parse_focus(const json& j, const std::string& pointer) {
  FocusParams p;
  read(j, "threshold", p.threshold, pointer);
  read(j, "dilation", p.dilation, pointer);
  read(j, "min_chip", p.min_chip, pointer);
  read(j, "strict", p.strict_threshold, pointer);
  return p;
}

}  // namespace

PipelineConfig parse_config(const json& doc) {
  if (!doc.is_object()) bad("", "config must be a JSON object");
  PipelineConfig c;
  if (doc.contains("profile")) {
    c = profile(doc["profile"].get<std::string>());
  } else {
    c.profile = "custom";
  }
  if (doc.contains("pyramid")) {
    const json& p = doc["pyramid"];
    if (!p.is_array()) bad("/pyramid", "pyramid must be an array");
    std::vector<ScaleSpec> pyramid;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const ScaleSpec base = i < c.pyramid.size() ? c.pyramid[i] : ScaleSpec{};
      pyramid.push_back(parse_scale(p[i], static_cast<int>(i), base, "/pyramid/" + std::to_string(i)));
    }
    c.pyramid = std::move(pyramid);
  }
  if (doc.contains("sniper")) {
    const json& s = doc["sniper"];
    // Chip geometry given here applies to every level.
    if (s.contains("chip_size") || s.contains("chip_stride")) {
      for (ScaleSpec& spec : c.pyramid) {
        read(s, "chip_size", spec.chip_size, "/sniper");
        read(s, "chip_stride", spec.chip_stride, "/sniper");
      }
    }
    read(s, "min_proposals", c.sniper.min_proposals, "/sniper");
    read(s, "negatives_per_image", c.sniper.negatives_per_image, "/sniper");
    read(s, "seed", c.sniper.seed, "/sniper");
    read(s, "range_filter_proposals", c.sniper.range_filter_proposals, "/sniper");
    if (s.contains("membership")) {
      const std::string m = s["membership"].get<std::string>();
      if (m == "center") {
        c.sniper.membership = ProposalMembership::center;
      } else if (m == "enclosed") {
        c.sniper.membership = ProposalMembership::enclosed;
      } else {
        bad("/sniper/membership", "membership must be 'center' or 'enclosed'");
      }
    }
  }
  if (doc.contains("autofocus")) {
    const json& a = doc["autofocus"];
    read(a, "stride", c.autofocus.stride, "/autofocus");
    read(a, "a", c.autofocus.thresholds.a, "/autofocus");
    read(a, "b", c.autofocus.thresholds.b, "/autofocus");
    read(a, "c", c.autofocus.thresholds.c, "/autofocus");
    read(a, "stats_dilation", c.autofocus.stats_dilation, "/autofocus");
    if (a.contains("focus")) {
      if (!a["focus"].is_array()) bad("/autofocus/focus", "focus must be an array");
      c.autofocus.focus.clear();
      for (std::size_t i = 0; i < a["focus"].size(); ++i) {
        c.autofocus.focus.push_back(
            parse_focus(a["focus"][i], "/autofocus/focus/" + std::to_string(i)));
      }
    }
    if (a.contains("upper_bound")) {
      read(a["upper_bound"], "dilation", c.autofocus.upper_bound_dilation, "/autofocus/upper_bound");
      read(a["upper_bound"], "min_chips", c.autofocus.upper_bound_min_chips,
           "/autofocus/upper_bound");
    }
  }
  if (doc.contains("merge")) {
    const json& m = doc["merge"];
    if (m.contains("mode")) c.merge.mode = merge_mode_from_string(m["mode"].get<std::string>());
    read(m, "iou_threshold", c.merge.iou_threshold, "/merge");
    read(m, "sigma", c.merge.sigma, "/merge");
    read(m, "score_floor", c.merge.score_floor, "/merge");
  }
  if (doc.contains("stacking")) {
    const json& s = doc["stacking"];
    read(s, "boundary_epsilon", c.stacking.boundary_epsilon, "/stacking");
    read(s, "prune_before_range", c.stacking.prune_before_range, "/stacking");
    read(s, "range_filter", c.stacking.range_filter, "/stacking");
  }
  return c;
}

json to_json(const PipelineConfig& c) {
  json pyramid = json::array();
  for (const ScaleSpec& s : c.pyramid) pyramid.push_back(scale_to_json(s));
  json focus = json::array();
  for (const FocusParams& p : c.autofocus.focus) {
    focus.push_back({{"threshold", p.threshold},
                     {"dilation", p.dilation},
                     {"min_chip", p.min_chip},
                     {"strict", p.strict_threshold}});
  }
  return {
      {"profile", c.profile},
      {"pyramid", pyramid},
      {"sniper",
       {{"min_proposals", c.sniper.min_proposals},
        {"negatives_per_image", c.sniper.negatives_per_image},
        {"seed", c.sniper.seed},
        {"membership", c.sniper.membership == ProposalMembership::center ? "center" : "enclosed"},
        {"range_filter_proposals", c.sniper.range_filter_proposals}}},
      {"autofocus",
       {{"stride", c.autofocus.stride},
        {"a", c.autofocus.thresholds.a},
        {"b", c.autofocus.thresholds.b},
        {"c", c.autofocus.thresholds.c},
        {"focus", focus},
        {"stats_dilation", c.autofocus.stats_dilation},
        {"upper_bound",
         {{"dilation", c.autofocus.upper_bound_dilation},
          {"min_chips", c.autofocus.upper_bound_min_chips}}}}},
      {"merge",
       {{"mode", to_string(c.merge.mode)},
        {"iou_threshold", c.merge.iou_threshold},
        {"sigma", c.merge.sigma},
        {"score_floor", c.merge.score_floor}}},
      {"stacking",
       {{"boundary_epsilon", c.stacking.boundary_epsilon},
        {"prune_before_range", c.stacking.prune_before_range},
        {"range_filter", c.stacking.range_filter}}},
  };
}

PipelineConfig load_config(const std::string& path) {
  try {
    return parse_config(read_json_file(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::structure) {
      throw Error(e.kind(), e.what(), path + "#" + e.path());
    }
    throw;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::structure, e.what(), path);
  }
}

ConfigIssues check_config(const PipelineConfig& c) {
  ConfigIssues issues;
  auto err = [&](const std::string& m) { issues.errors.push_back(m); };
  if (c.pyramid.empty()) err("pyramid is empty");
  for (std::size_t i = 0; i < c.pyramid.size(); ++i) {
    const ScaleSpec& s = c.pyramid[i];
    if (s.scale_id != static_cast<int>(i)) {
      err("scale " + std::to_string(i) + ": scale_id must equal its position");
    }
    try {
      s.validate();
    } catch (const Error& e) {
      err(e.what());
    }
  }
  if (!issues.ok()) return issues;

  const ImageSize reference{640, 480};
  for (std::size_t i = 1; i < c.pyramid.size(); ++i) {
    if (c.pyramid[i].canvas(reference).area() <= c.pyramid[i - 1].canvas(reference).area()) {
      err("pyramid must be ordered by increasing resolution (scale " + std::to_string(i) + ")");
    }
  }
  // Coverage of box sizes: every original-frame area should be valid on some level.
  struct Interval {
    double lo, hi;
    int id;
  };
  std::vector<Interval> ivs;
  for (const ScaleSpec& s : c.pyramid) {
    const AreaRange r = s.canvas_range(reference);
    const ImageSize cv = s.canvas(reference);
    const double f = (static_cast<double>(cv.width) / reference.width) *
                     (static_cast<double>(cv.height) / reference.height);
    ivs.push_back({r.min / f, r.unbounded() ? r.max : r.max / f, s.scale_id});
  }
  std::sort(ivs.begin(), ivs.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  if (!ivs.empty()) {
    if (ivs.front().lo > 0.0) {
      issues.warnings.push_back("areas below " + std::to_string(ivs.front().lo) +
                                " px^2 (original frame, 640x480 reference) are valid on no level");
    }
    double reach = ivs.front().hi;
    for (std::size_t i = 1; i < ivs.size(); ++i) {
      if (ivs[i].lo > reach) {
        std::ostringstream os;
        os << "gap in valid ranges between " << reach << " and " << ivs[i].lo
           << " px^2 (original frame, 640x480 reference)";
        issues.warnings.push_back(os.str());
      }
      reach = std::max(reach, ivs[i].hi);
    }
    if (!std::isinf(reach)) {
      issues.warnings.push_back("areas above " + std::to_string(reach) + " px^2 are valid on no level");
    }
  }

  if (c.sniper.min_proposals < 1) err("sniper.min_proposals must be >= 1");
  if (c.sniper.negatives_per_image < 0) err("sniper.negatives_per_image must be >= 0");
  if (c.autofocus.stride < 1) err("autofocus.stride must be >= 1");
  try {
    c.autofocus.thresholds.validate();
  } catch (const Error& e) {
    err(e.what());
  }
  for (const FocusParams& p : c.autofocus.focus) {
    try {
      p.validate();
    } catch (const Error& e) {
      err(e.what());
    }
  }
  if (c.autofocus.stats_dilation < 1 || c.autofocus.stats_dilation % 2 == 0) {
    err("autofocus.stats_dilation must be odd and >= 1");
  }
  if (c.autofocus.upper_bound_dilation < 1 || c.autofocus.upper_bound_dilation % 2 == 0) {
    err("autofocus.upper_bound.dilation must be odd and >= 1");
  }
  for (int k : c.autofocus.upper_bound_min_chips) {
    if (k < 1) err("autofocus.upper_bound.min_chips entries must be >= 1");
  }
  try {
    c.merge.validate();
  } catch (const Error& e) {
    err(e.what());
  }
  if (c.stacking.boundary_epsilon < 0.0) err("stacking.boundary_epsilon must be >= 0");
  return issues;
}

}  // namespace scalenorm
