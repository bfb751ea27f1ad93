// scalenorm: command-line front end over the scalenorm library.
//
// Every subcommand reads COCO-style inputs, writes JSON / CSV / binary maps
// atomically, and on failure prints one JSON error record to stderr.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "scalenorm/config.hpp"
#include "scalenorm/costing.hpp"
#include "scalenorm/dataset.hpp"
#include "scalenorm/error.hpp"
#include "scalenorm/focus_chips.hpp"
#include "scalenorm/focus_labels.hpp"
#include "scalenorm/focus_stacking.hpp"
#include "scalenorm/parallel.hpp"
#include "scalenorm/serialize.hpp"
#include "scalenorm/sniper_chips.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace scalenorm;

namespace {

constexpr int kExitError = 2;

struct Globals {
  std::string config_path;
  std::string profile_name = "coco-default";
  unsigned workers = 0;

  PipelineConfig config() const {
    PipelineConfig c = config_path.empty() ? profile(profile_name) : load_config(config_path);
    const ConfigIssues issues = check_config(c);
    if (!issues.ok()) {
      throw Error(ErrorKind::invalid_argument, "invalid config: " + issues.errors.front(),
                  config_path);
    }
    return c;
  }
  unsigned pool() const { return workers ? workers : default_workers(); }
};

void emit(const std::string& out, const std::string& contents) {
  if (out.empty() || out == "-") {
    std::cout << contents;
    std::cout.flush();
  } else {
    write_file_atomic(out, contents);
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

const ScaleSpec& level(const PipelineConfig& c, int scale) {
  if (scale < 0 || static_cast<std::size_t>(scale) >= c.pyramid.size()) {
    throw invalid_argument("scale " + std::to_string(scale) + " is not in the pyramid (0.." +
                           std::to_string(c.pyramid.size() - 1) + ")");
  }
  return c.pyramid[static_cast<std::size_t>(scale)];
}

// Per-image seed, independent of worker scheduling.
std::uint64_t image_seed(std::uint64_t seed, long long image_id) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(image_id) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<fs::path> list_files(const fs::path& root, const std::set<std::string>& extensions) {
  if (!fs::exists(root)) throw Error(ErrorKind::io, "no such file or directory", root.string());
  std::vector<fs::path> out;
  if (fs::is_regular_file(root)) return {root};
  for (const auto& e : fs::directory_iterator(root)) {
    if (e.is_regular_file() && extensions.count(e.path().extension().string())) {
      out.push_back(e.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// chips

struct ChipsArgs {
  std::string annotations;
  std::string proposals;
  std::string positives;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> per_image;
};

ChipSet positive_chip_set(const DatasetIndex& index, const PipelineConfig& c, unsigned workers) {
  const auto per_image = parallel_map<PositiveChips>(
      index.images.size(), workers, [&](std::size_t i) {
        const ImageRecord& img = index.images[i];
        PositiveChips r = select_positive_chips(index.gts(img.id), c.pyramid, img.size);
        for (Chip& chip : r.chips) chip.image_id = img.id;
        return r;
      });
  ChipSet set;
  for (std::size_t i = 0; i < per_image.size(); ++i) {
    const long long id = index.images[i].id;
    set.chips.insert(set.chips.end(), per_image[i].chips.begin(), per_image[i].chips.end());
    for (const UncoverableGt& u : per_image[i].too_large) set.too_large.emplace_back(id, u);
  }
  return set;
}

void run_chips_positive(const Globals& g, const ChipsArgs& a) {
  const PipelineConfig c = g.config();
  const DatasetIndex index = load_dataset(a.annotations);
  emit(a.out, dump(chip_set_to_json(positive_chip_set(index, c, g.pool()))));
}

void run_chips_negative(const Globals& g, const ChipsArgs& a) {
  const PipelineConfig c = g.config();
  const DatasetIndex index = load_dataset(a.annotations, fs::path(a.proposals));
  std::map<long long, std::vector<Chip>> positives;
  {
    const ChipSet set = a.positives.empty() ? positive_chip_set(index, c, g.pool())
                                            : chip_set_from_json(read_json_file(a.positives));
    for (const Chip& chip : set.chips) positives[chip.image_id].push_back(chip);
  }
  const std::uint64_t seed = a.seed.value_or(c.sniper.seed);
  const int n = a.per_image.value_or(c.sniper.negatives_per_image);
  if (n < 0) throw invalid_argument("negatives per image must be >= 0");

  struct Result {
    std::vector<Chip> pool, sampled;
  };
  const auto per_image = parallel_map<Result>(index.images.size(), g.pool(), [&](std::size_t i) {
    const ImageRecord& img = index.images[i];
    static const std::vector<Proposal> kNone;
    static const std::vector<Chip> kNoChips;
    const auto pit = index.proposals.find(img.id);
    const auto cit = positives.find(img.id);
    Result r;
    r.pool = select_negative_chips(pit == index.proposals.end() ? kNone : pit->second,
                                   cit == positives.end() ? kNoChips : cit->second, c.pyramid,
                                   img.size, c.negative_options());
    for (Chip& chip : r.pool) chip.image_id = img.id;
    r.sampled = sample_negative_chips(r.pool, static_cast<std::size_t>(n), image_seed(seed, img.id));
    return r;
  });
  json chips = json::array();
  json pool = json::array();
  for (const Result& r : per_image) {
    for (const Chip& chip : r.sampled) chips.push_back(chip_to_json(chip));
    for (const Chip& chip : r.pool) pool.push_back(chip_to_json(chip));
  }
  emit(a.out, dump({{"chips", chips}, {"too_large", json::array()}, {"pool", pool},
                    {"seed", seed}, {"negatives_per_image", n}}));
}

// ---------------------------------------------------------------------------
// focus

struct FocusArgs {
  std::string annotations;
  std::string out_dir;
  std::string probmaps;
  std::string out;
  std::string format = "bin";
  int scale = 0;
  std::optional<double> threshold;
  std::optional<int> dilation;
  std::optional<int> min_chip;
};

void run_focus_labels(const Globals& g, const FocusArgs& a) {
  const PipelineConfig c = g.config();
  const ScaleSpec& spec = level(c, a.scale);
  const DatasetIndex index = load_dataset(a.annotations);
  if (a.out_dir.empty()) throw invalid_argument("--out-dir is required");
  fs::create_directories(a.out_dir);
  const bool binary = a.format == "bin";
  const auto entries = parallel_map<json>(index.images.size(), g.pool(), [&](std::size_t i) {
    const ImageRecord& img = index.images[i];
    const ImageSize canvas = spec.canvas(img.size);
    const auto gts = rescale_gts(index.gts(img.id), img.size, canvas);
    const LabelMap map =
        build_focus_label_map(gts, canvas, c.autofocus.stride, c.autofocus.thresholds);
    const std::string name = std::to_string(img.id) + (binary ? ".snmp" : ".json");
    write_file_atomic(fs::path(a.out_dir) / name,
                      binary ? encode_map(map.grid) : dump(map_to_json(map.grid)));
    return json{{"image_id", img.id},
                {"file", name},
                {"canvas", {canvas.width, canvas.height}},
                {"grid", {map.grid.width(), map.grid.height()}}};
  });
  const json manifest{{"scale_id", spec.scale_id},
                      {"stride", c.autofocus.stride},
                      {"thresholds", {c.autofocus.thresholds.a, c.autofocus.thresholds.b,
                                      c.autofocus.thresholds.c}},
                      {"maps", entries}};
  write_file_atomic(fs::path(a.out_dir) / "index.json", dump(manifest));
}

ProbabilityMap read_probability_map(const fs::path& path) {
  if (path.extension() == ".json") {
    try {
      return probability_map_from_json(read_json_file(path));
    } catch (const Error& e) {
      throw Error(e.kind(), e.what(), path.string());
    }
  }
  try {
    return decode_probability_map(read_file(path));
  } catch (const Error& e) {
    throw Error(e.kind(), e.what(), path.string());
  }
}

void run_focus_chips(const Globals& g, const FocusArgs& a) {
  const PipelineConfig c = g.config();
  const ScaleSpec& spec = level(c, a.scale);
  const bool has_next = static_cast<std::size_t>(a.scale) + 1 < c.pyramid.size();
  FocusParams params = c.focus_params(static_cast<std::size_t>(a.scale));
  if (a.threshold) params.threshold = *a.threshold;
  if (a.dilation) params.dilation = *a.dilation;
  if (a.min_chip) params.min_chip = *a.min_chip;
  params.validate();
  const DatasetIndex index = load_dataset(a.annotations);

  std::vector<std::pair<long long, fs::path>> maps;
  for (const fs::path& p : list_files(a.probmaps, {".snmp", ".json"})) {
    if (p.filename() == "index.json") continue;
    long long id = 0;
    try {
      std::size_t used = 0;
      id = std::stoll(p.stem().string(), &used);
      if (used != p.stem().string().size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw Error(ErrorKind::structure, "map file name must be <image_id>.snmp or .json",
                  p.string());
    }
    index.image(id);
    maps.emplace_back(id, p);
  }
  std::sort(maps.begin(), maps.end());

  const auto per_image = parallel_map<std::vector<Chip>>(maps.size(), g.pool(), [&](std::size_t i) {
    const auto& [id, path] = maps[i];
    const ImageRecord& img = index.image(id);
    const ImageSize canvas = spec.canvas(img.size);
    std::vector<Chip> out;
    for (const Box& rect : generate_focus_chips(read_probability_map(path), params, canvas)) {
      Chip chip;
      chip.image_id = id;
      chip.kind = ChipKind::focus;
      if (has_next) {
        const ScaleSpec& next = c.pyramid[static_cast<std::size_t>(a.scale) + 1];
        const ImageSize target = next.canvas(img.size);
        chip.scale_id = next.scale_id;
        chip.rect = clamp_box(rescale_box(rect, canvas, target), target);
      } else {
        chip.scale_id = spec.scale_id;
        chip.rect = rect;
      }
      out.push_back(std::move(chip));
    }
    return out;
  });
  ChipSet set;
  for (const auto& chips : per_image) set.chips.insert(set.chips.end(), chips.begin(), chips.end());
  json doc = chip_set_to_json(set);
  doc["params"] = {{"threshold", params.threshold},
                   {"dilation", params.dilation},
                   {"min_chip", params.min_chip},
                   {"strict", params.strict_threshold}};
  doc["source_scale_id"] = spec.scale_id;
  emit(a.out, dump(doc));
}

// ---------------------------------------------------------------------------
// stack

struct StackArgs {
  std::string annotations;
  std::string detections;
  std::string out;
};

ChipDetections parse_chip_detections(const json& r, const DatasetIndex& index,
                                     const PipelineConfig& c, const std::string& where,
                                     long long& image_id) {
  try {
    image_id = r.at("image_id").get<long long>();
    ChipDetections cd;
    cd.scale_id = r.at("scale_id").get<int>();
    const ImageRecord& img = index.image(image_id);
    cd.canvas = level(c, cd.scale_id).canvas(img.size);
    if (r.contains("canvas") && !r["canvas"].is_null()) {
      const json& cv = r["canvas"];
      if (!cv.is_array() || cv.size() != 2) {
        throw Error(ErrorKind::structure, "canvas must be [width, height]", where);
      }
      cd.canvas = ImageSize{cv[0].get<int>(), cv[1].get<int>()};
      if (!cd.canvas.valid()) throw Error(ErrorKind::structure, "canvas must be >= 1", where);
    }
    if (r.contains("chip") && !r["chip"].is_null()) cd.chip = box_from_json(r["chip"]);
    for (const json& d : r.at("detections")) {
      Detection det;
      const json& bb = d.at("bbox");
      if (!bb.is_array() || bb.size() != 4) {
        throw Error(ErrorKind::structure, "bbox must be [x, y, w, h]", where);
      }
      det.box = box_from_xywh(bb[0].get<double>(), bb[1].get<double>(), bb[2].get<double>(),
                              bb[3].get<double>());
      det.score = d.at("score").get<double>();
      det.class_id = d.value("category_id", 0);
      if (det.score < 0.0 || det.score > 1.0) {
        throw Error(ErrorKind::structure, "score must lie in [0, 1]", where);
      }
      cd.detections.push_back(det);
    }
    return cd;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::structure, e.what(), where);
  }
}

void run_stack(const Globals& g, const StackArgs& a) {
  const PipelineConfig c = g.config();
  const DatasetIndex index = load_dataset(a.annotations);
  std::map<long long, std::vector<ChipDetections>> by_image;
  for (const fs::path& file : list_files(a.detections, {".json"})) {
    const json doc = read_json_file(file);
    const json records = doc.is_array() ? doc : json::array({doc});
    for (std::size_t i = 0; i < records.size(); ++i) {
      long long id = 0;
      ChipDetections cd = parse_chip_detections(
          records[i], index, c, file.string() + "#/" + std::to_string(i), id);
      by_image[id].push_back(std::move(cd));
    }
  }
  std::vector<long long> ids;
  for (const auto& [id, _] : by_image) ids.push_back(id);
  const auto merged = parallel_map<std::vector<Detection>>(ids.size(), g.pool(), [&](std::size_t i) {
    const ImageRecord& img = index.image(ids[i]);
    std::vector<AreaRange> ranges;
    for (const ScaleSpec& s : c.pyramid) ranges.push_back(s.canvas_range(img.size));
    return stack_detections(by_image.at(ids[i]), ranges, img.size, c.merge, c.stacking);
  });
  json out = json::array();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (const Detection& d : merged[i]) out.push_back(detection_to_json(ids[i], d));
  }
  emit(a.out, dump(out));
}

// ---------------------------------------------------------------------------
// stats

struct StatsArgs {
  std::string annotations;
  std::string out;
  std::string format = "json";
  std::string curve;
  int bins = 20;
  std::vector<int> min_chips;
};

std::string csv_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void run_stats_roiscale(const Globals&, const StatsArgs& a) {
  const DatasetIndex index = load_dataset(a.annotations);
  const auto images = index.annotated();
  const ScaleHistogram h = roi_scale_histogram(images, a.bins);
  if (!a.curve.empty()) {
    std::ostringstream os;
    os << "# relative_scale fraction_of_rois\n";
    for (std::size_t i = 0; i < h.mass.size(); ++i) {
      os << csv_number(0.5 * (h.edges[i] + h.edges[i + 1])) << ' ' << csv_number(h.mass[i]) << '\n';
    }
    write_file_atomic(a.curve, os.str());
  }
  if (a.format == "csv") {
    std::ostringstream os;
    os << "bin_low,bin_high,fraction\n";
    for (std::size_t i = 0; i < h.mass.size(); ++i) {
      os << csv_number(h.edges[i]) << ',' << csv_number(h.edges[i + 1]) << ','
         << csv_number(h.mass[i]) << '\n';
    }
    emit(a.out, os.str());
    return;
  }
  emit(a.out, dump({{"instances", h.sorted_values.size()},
                    {"edges", h.edges},
                    {"mass", h.mass},
                    {"deciles", h.deciles},
                    {"decile_ratio", h.decile_ratio()}}));
}

void run_stats_areafractions(const Globals&, const StatsArgs& a) {
  const DatasetIndex index = load_dataset(a.annotations);
  const SizeFractions f = size_area_fractions(index.annotated());
  if (a.format == "csv") {
    std::ostringstream os;
    os << "band,min_area,max_area,instances,instance_fraction,area_fraction\n";
    for (const BandFraction& b : f.bands) {
      os << b.name << ',' << csv_number(b.min_area) << ',' << csv_number(b.max_area) << ','
         << b.instances << ',' << csv_number(b.instance_fraction) << ','
         << csv_number(b.area_fraction) << '\n';
    }
    os << "background,,,0,0," << csv_number(f.background_area_fraction) << '\n';
    emit(a.out, os.str());
    return;
  }
  json bands = json::array();
  for (const BandFraction& b : f.bands) {
    bands.push_back({{"name", b.name},
                     {"min_area", b.min_area},
                     {"max_area", std::isinf(b.max_area) ? json(nullptr) : json(b.max_area)},
                     {"instances", b.instances},
                     {"instance_fraction", b.instance_fraction},
                     {"area_fraction", b.area_fraction}});
  }
  emit(a.out, dump({{"images", index.images.size()},
                    {"instances", f.instances},
                    {"image_area", f.image_area},
                    {"bands", bands},
                    {"background_area_fraction", f.background_area_fraction}}));
}

void run_stats_focuspixels(const Globals& g, const StatsArgs& a) {
  const PipelineConfig c = g.config();
  const DatasetIndex index = load_dataset(a.annotations);
  const auto stats =
      focus_pixel_stats(index.annotated(), c.pyramid, c.autofocus.stride, c.autofocus.thresholds,
                        c.autofocus.stats_dilation, g.pool());
  if (a.format == "csv") {
    std::ostringstream os;
    os << "scale_id,cells,focus_cells,dilated_focus_cells,fraction,dilated_fraction,"
          "mean_focus_area,mean_focus_area_original,mean_canvas_area\n";
    for (const FocusPixelStats& s : stats) {
      os << s.scale_id << ',' << s.cells << ',' << s.focus_cells << ',' << s.dilated_focus_cells
         << ',' << csv_number(s.fraction) << ',' << csv_number(s.dilated_fraction) << ','
         << csv_number(s.mean_focus_area) << ',' << csv_number(s.mean_focus_area_original) << ','
         << csv_number(s.mean_canvas_area) << '\n';
    }
    emit(a.out, os.str());
    return;
  }
  json levels = json::array();
  for (const FocusPixelStats& s : stats) {
    levels.push_back({{"scale_id", s.scale_id},
                      {"cells", s.cells},
                      {"focus_cells", s.focus_cells},
                      {"dilated_focus_cells", s.dilated_focus_cells},
                      {"fraction", s.fraction},
                      {"dilated_fraction", s.dilated_fraction},
                      {"mean_focus_area", s.mean_focus_area},
                      {"mean_focus_area_original", s.mean_focus_area_original},
                      {"mean_canvas_area", s.mean_canvas_area}});
  }
  emit(a.out, dump({{"images", index.images.size()},
                    {"stride", c.autofocus.stride},
                    {"dilation", c.autofocus.stats_dilation},
                    {"levels", levels}}));
}

void run_stats_speedup(const Globals& g, const StatsArgs& a) {
  const PipelineConfig c = g.config();
  const DatasetIndex index = load_dataset(a.annotations);
  UpperBoundOptions opt;
  opt.stride = c.autofocus.stride;
  opt.thresholds = c.autofocus.thresholds;
  opt.dilation = c.autofocus.upper_bound_dilation;
  opt.min_chip_sizes = a.min_chips.empty() ? c.autofocus.upper_bound_min_chips : a.min_chips;
  opt.workers = g.pool();
  for (int k : opt.min_chip_sizes) {
    if (k < 1) throw invalid_argument("minimum chip sizes must be >= 1");
  }
  const auto curve = speedup_upper_bound(index.annotated(), c.pyramid, opt);
  if (!a.curve.empty()) {
    std::ostringstream os;
    os << "# min_chip speedup\n";
    for (const SpeedupPoint& p : curve) {
      os << p.min_chip << ' ' << csv_number(p.report.speedup()) << '\n';
    }
    write_file_atomic(a.curve, os.str());
  }
  if (a.format == "csv") {
    std::ostringstream os;
    os << "min_chip,processed,baseline,speedup,processed_side,baseline_side\n";
    for (const SpeedupPoint& p : curve) {
      os << p.min_chip << ',' << csv_number(p.report.processed) << ','
         << csv_number(p.report.baseline) << ',' << csv_number(p.report.speedup()) << ','
         << csv_number(p.report.processed_side()) << ',' << csv_number(p.report.baseline_side())
         << '\n';
    }
    emit(a.out, os.str());
    return;
  }
  json points = json::array();
  for (const SpeedupPoint& p : curve) {
    json per_scale = json::array();
    for (const ScaleCost& s : p.report.per_scale) {
      per_scale.push_back(
          {{"scale_id", s.scale_id}, {"processed", s.processed}, {"baseline", s.baseline}});
    }
    points.push_back({{"min_chip", p.min_chip},
                      {"processed", p.report.processed},
                      {"baseline", p.report.baseline},
                      {"speedup", p.report.speedup()},
                      {"processed_side", p.report.processed_side()},
                      {"baseline_side", p.report.baseline_side()},
                      {"per_scale", per_scale}});
  }
  emit(a.out, dump({{"images", index.images.size()},
                    {"dilation", opt.dilation},
                    {"threshold", opt.threshold},
                    {"curve", points}}));
}

// ---------------------------------------------------------------------------
// validate / convert / config

int run_validate(const Globals& g) {
  const PipelineConfig c =
      g.config_path.empty() ? profile(g.profile_name) : load_config(g.config_path);
  const ConfigIssues issues = check_config(c);
  std::cout << dump({{"ok", issues.ok()}, {"errors", issues.errors}, {"warnings", issues.warnings}});
  return issues.ok() ? 0 : 1;
}

void run_convert_voc(const std::vector<std::string>& inputs, const std::string& out) {
  std::vector<fs::path> files;
  for (const std::string& in : inputs) {
    for (const fs::path& p : list_files(in, {".xml"})) files.push_back(p);
  }
  if (files.empty()) throw Error(ErrorKind::empty_input, "no VOC .xml files found");
  emit(out, dump(voc_to_coco(files)));
}

void print_error(const std::string& kind, const std::string& message, const std::string& path) {
  json rec{{"error", {{"kind", kind}, {"message", message}}}};
  if (!path.empty()) rec["error"]["path"] = path;
  std::cerr << rec.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scale-normalized pyramid sampling: chips, focus maps, stacking and cost reports"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "Pipeline config JSON")->check(CLI::ExistingFile);
  app.add_option("--profile", g.profile_name, "Built-in profile when no --config is given");
  app.add_option("--workers", g.workers, "Worker threads (default: SCALENORM_WORKERS or cores)");
  int exit_code = 0;

  // chips
  ChipsArgs chips;
  auto* chips_cmd = app.add_subcommand("chips", "SNIPER chip generation")->require_subcommand(1);
  chips_cmd->fallthrough();
  auto* pos = chips_cmd->add_subcommand("positive", "Greedy positive chips per image");
  pos->add_option("--annotations,-a", chips.annotations, "COCO annotation JSON")->required();
  pos->add_option("--out,-o", chips.out, "Output chip JSON (default stdout)");
  pos->callback([&] { run_chips_positive(g, chips); });
  auto* neg = chips_cmd->add_subcommand("negative", "Proposal-driven negative chips");
  neg->add_option("--annotations,-a", chips.annotations, "COCO annotation JSON")->required();
  neg->add_option("--proposals,-p", chips.proposals, "COCO-results proposals")->required();
  neg->add_option("--positives", chips.positives, "Positive chip JSON (computed if absent)");
  neg->add_option("--seed", chips.seed, "Sampling seed (overrides config)");
  neg->add_option("--per-image,-n", chips.per_image, "Negatives sampled per image");
  neg->add_option("--out,-o", chips.out, "Output chip JSON (default stdout)");
  neg->callback([&] { run_chips_negative(g, chips); });

  // focus
  FocusArgs focus;
  auto* focus_cmd = app.add_subcommand("focus", "FocusPixel maps and FocusChips")->require_subcommand(1);
  focus_cmd->fallthrough();
  auto* labels = focus_cmd->add_subcommand("labels", "Ground-truth FocusPixel label maps");
  labels->add_option("--annotations,-a", focus.annotations, "COCO annotation JSON")->required();
  labels->add_option("--scale,-s", focus.scale, "Pyramid level")->required();
  labels->add_option("--out-dir,-o", focus.out_dir, "Directory for <image_id> map files")->required();
  labels->add_option("--format", focus.format, "bin or json")->check(CLI::IsMember({"bin", "json"}));
  labels->callback([&] { run_focus_labels(g, focus); });
  auto* fchips = focus_cmd->add_subcommand("chips", "FocusChips from probability maps");
  fchips->add_option("--annotations,-a", focus.annotations, "COCO annotation JSON")->required();
  fchips->add_option("--probmaps,-m", focus.probmaps, "Directory of <image_id>.snmp|.json maps")
      ->required();
  fchips->add_option("--scale,-s", focus.scale, "Level the maps were predicted at")->required();
  fchips->add_option("--threshold,-t", focus.threshold, "Probability threshold t");
  fchips->add_option("--dilation,-d", focus.dilation, "Dilation kernel d (odd)");
  fchips->add_option("--min-chip,-k", focus.min_chip, "Minimum chip side k, pixels");
  fchips->add_option("--out,-o", focus.out, "Output chip JSON (default stdout)");
  fchips->callback([&] { run_focus_chips(g, focus); });

  // stack
  StackArgs stack;
  auto* stack_cmd = app.add_subcommand("stack", "Prune, project and merge per-chip detections");
  stack_cmd->fallthrough();
  stack_cmd->add_option("--annotations,-a", stack.annotations, "COCO annotation JSON (image sizes)")
      ->required();
  stack_cmd->add_option("--detections,-d", stack.detections, "Per-chip detection file or directory")
      ->required();
  stack_cmd->add_option("--out,-o", stack.out, "Output COCO-results JSON (default stdout)");
  stack_cmd->callback([&] { run_stack(g, stack); });

  // stats
  StatsArgs stats;
  auto* stats_cmd = app.add_subcommand("stats", "Annotation statistics and cost reports")
                        ->require_subcommand(1);
  stats_cmd->fallthrough();
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--annotations,-a", stats.annotations, "COCO annotation JSON")->required();
    cmd->add_option("--out,-o", stats.out, "Report file (default stdout)");
    cmd->add_option("--format", stats.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  };
  auto* roiscale = stats_cmd->add_subcommand("roiscale", "Relative RoI scale histogram");
  add_common(roiscale);
  roiscale->add_option("--bins", stats.bins, "Histogram bins")->check(CLI::PositiveNumber);
  roiscale->add_option("--curve", stats.curve, "gnuplot data file");
  roiscale->callback([&] { run_stats_roiscale(g, stats); });
  auto* areas = stats_cmd->add_subcommand("areafractions", "Instance and area share per size band");
  add_common(areas);
  areas->callback([&] { run_stats_areafractions(g, stats); });
  auto* fp = stats_cmd->add_subcommand("focuspixels", "FocusPixel fractions per level");
  add_common(fp);
  fp->callback([&] { run_stats_focuspixels(g, stats); });
  auto* speedup = stats_cmd->add_subcommand("speedup", "Upper-bound speed-up versus min chip size");
  add_common(speedup);
  speedup->add_option("--min-chips", stats.min_chips, "Minimum chip sizes to sweep")->delimiter(',');
  speedup->add_option("--curve", stats.curve, "gnuplot data file");
  speedup->callback([&] { run_stats_speedup(g, stats); });

  // validate
  auto* validate = app.add_subcommand("validate", "Check config invariants (exit 0 ok, 1 invalid)");
  validate->fallthrough();
  validate->callback([&] { exit_code = run_validate(g); });

  // convert
  std::vector<std::string> voc_inputs;
  std::string convert_out;
  auto* convert = app.add_subcommand("convert", "Format converters")->require_subcommand(1);
  auto* voc = convert->add_subcommand("voc", "PASCAL VOC XML to COCO annotation JSON");
  voc->add_option("inputs", voc_inputs, "XML files or directories")->required();
  voc->add_option("--out,-o", convert_out, "Output COCO JSON (default stdout)");
  voc->callback([&] { run_convert_voc(voc_inputs, convert_out); });

  // config
  auto* config_cmd = app.add_subcommand("config", "Inspect configs and profiles")->require_subcommand(1);
  config_cmd->fallthrough();
  auto* show = config_cmd->add_subcommand("dump", "Print the resolved config");
  show->callback([&] {
    const PipelineConfig c =
        g.config_path.empty() ? profile(g.profile_name) : load_config(g.config_path);
    std::cout << dump(to_json(c));
  });
  auto* names = config_cmd->add_subcommand("profiles", "List built-in profiles");
  names->callback([&] { std::cout << dump(profile_names()); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what(), "");
    return kExitError;
  } catch (const Error& e) {
    print_error(to_string(e.kind()), e.what(), e.path());
    return validate->parsed() ? 1 : kExitError;
  } catch (const nlohmann::json::exception& e) {
    print_error("structure", e.what(), "");
    return kExitError;
  } catch (const fs::filesystem_error& e) {
    print_error("io", e.what(), e.path1().string());
    return kExitError;
  } catch (const std::exception& e) {
    print_error("internal", e.what(), "");
    return kExitError;
  }
  return exit_code;
}
