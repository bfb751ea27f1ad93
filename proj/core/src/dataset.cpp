#include "scalenorm/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "scalenorm/error.hpp"

namespace scalenorm {

using nlohmann::json;

const ImageRecord& DatasetIndex::image(long long id) const {
  const auto it = std::lower_bound(images.begin(), images.end(), id,
                                   [](const ImageRecord& r, long long v) { return r.id < v; });
  if (it == images.end() || it->id != id) {
    throw Error(ErrorKind::structure, "unknown image_id " + std::to_string(id));
  }
  return *it;
}

const std::vector<GroundTruth>& DatasetIndex::gts(long long id) const {
  static const std::vector<GroundTruth> kEmpty;
  const auto it = annotations.find(id);
  return it == annotations.end() ? kEmpty : it->second;
}

std::vector<AnnotatedImage> DatasetIndex::annotated() const {
  std::vector<AnnotatedImage> out;
  out.reserve(images.size());
  for (const ImageRecord& r : images) out.push_back(AnnotatedImage{r.id, r.size, gts(r.id)});
  return out;
}

namespace {

std::string where(const std::string& source, const std::string& pointer) {
  return source.empty() ? pointer : source + "#" + pointer;
}

const json& require(const json& obj, const char* key, const std::string& source,
                    const std::string& pointer) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw Error(ErrorKind::structure, std::string("missing field '") + key + "'",
                where(source, pointer));
  }
  return obj.at(key);
}

double number(const json& v, const std::string& source, const std::string& pointer) {
  if (!v.is_number()) throw Error(ErrorKind::structure, "expected a number", where(source, pointer));
  return v.get<double>();
}

long long integer(const json& v, const std::string& source, const std::string& pointer) {
  if (!v.is_number_integer()) {
    throw Error(ErrorKind::structure, "expected an integer", where(source, pointer));
  }
  return v.get<long long>();
}

Box parse_xywh(const json& v, const std::string& source, const std::string& pointer) {
  if (!v.is_array() || v.size() != 4) {
    throw Error(ErrorKind::structure, "bbox must be [x, y, w, h]", where(source, pointer));
  }
  double x[4];
  for (std::size_t i = 0; i < 4; ++i) {
    x[i] = number(v[i], source, pointer + "/" + std::to_string(i));
  }
  if (x[2] < 0.0 || x[3] < 0.0) {
    throw Error(ErrorKind::structure, "bbox width and height must be >= 0",
                where(source, pointer));
  }
  return box_from_xywh(x[0], x[1], x[2], x[3]);
}

std::string list_ids(const std::set<long long>& ids) {
  std::ostringstream os;
  std::size_t n = 0;
  for (long long id : ids) {
    if (n++) os << ", ";
    if (n > 20) {
      os << "... (" << ids.size() << " total)";
      break;
    }
    os << id;
  }
  return os.str();
}

}  // namespace

DatasetIndex parse_coco(const json& doc, const std::string& source) {
  if (!doc.is_object()) throw Error(ErrorKind::structure, "expected a JSON object", where(source, ""));
  DatasetIndex index;
  const json& images = require(doc, "images", source, "");
  if (!images.is_array()) throw Error(ErrorKind::structure, "'images' must be an array", where(source, "/images"));
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::string p = "/images/" + std::to_string(i);
    const json& im = images[i];
    ImageRecord r;
    r.id = integer(require(im, "id", source, p), source, p + "/id");
    r.size.width = static_cast<int>(integer(require(im, "width", source, p), source, p + "/width"));
    r.size.height =
        static_cast<int>(integer(require(im, "height", source, p), source, p + "/height"));
    if (!r.size.valid()) throw Error(ErrorKind::structure, "image size must be >= 1", where(source, p));
    if (im.contains("file_name") && im["file_name"].is_string()) r.file_name = im["file_name"];
    index.images.push_back(std::move(r));
  }
  std::sort(index.images.begin(), index.images.end(),
            [](const ImageRecord& a, const ImageRecord& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < index.images.size(); ++i) {
    if (index.images[i].id == index.images[i - 1].id) {
      throw Error(ErrorKind::structure, "duplicate image id " + std::to_string(index.images[i].id),
                  where(source, "/images"));
    }
  }

  if (doc.contains("categories") && doc["categories"].is_array()) {
    for (const json& c : doc["categories"]) {
      if (c.contains("id") && c["id"].is_number_integer()) {
        index.categories[c["id"].get<int>()] =
            c.contains("name") && c["name"].is_string() ? c["name"].get<std::string>() : "";
      }
    }
  }

  std::set<long long> dangling;
  if (doc.contains("annotations")) {
    const json& anns = doc["annotations"];
    if (!anns.is_array()) {
      throw Error(ErrorKind::structure, "'annotations' must be an array", where(source, "/annotations"));
    }
    for (std::size_t i = 0; i < anns.size(); ++i) {
      const std::string p = "/annotations/" + std::to_string(i);
      const json& a = anns[i];
      const long long image_id = integer(require(a, "image_id", source, p), source, p + "/image_id");
      GroundTruth gt;
      gt.box = parse_xywh(require(a, "bbox", source, p), source, p + "/bbox");
      gt.class_id = static_cast<int>(
          integer(require(a, "category_id", source, p), source, p + "/category_id"));
      if (gt.class_id < 0) throw Error(ErrorKind::structure, "category_id must be >= 0", where(source, p));
      if (a.contains("iscrowd")) gt.crowd = a["iscrowd"].is_boolean() ? a["iscrowd"].get<bool>()
                                                                       : a["iscrowd"].get<int>() != 0;
      const auto img = std::lower_bound(
          index.images.begin(), index.images.end(), image_id,
          [](const ImageRecord& r, long long v) { return r.id < v; });
      if (img == index.images.end() || img->id != image_id) {
        dangling.insert(image_id);
        continue;
      }
      const Box clamped = clamp_box(gt.box, img->size);
      if (!(clamped == gt.box)) {
        ++index.clamped_boxes;
        gt.box = clamped;
      }
      index.annotations[image_id].push_back(gt);
    }
  }
  if (!dangling.empty()) {
    throw Error(ErrorKind::structure,
                "annotations reference unknown image ids: " + list_ids(dangling),
                where(source, "/annotations"));
  }
  return index;
}

std::vector<std::pair<long long, Detection>> parse_results(const json& doc,
                                                           const std::string& source) {
  if (!doc.is_array()) throw Error(ErrorKind::structure, "expected an array of results", where(source, ""));
  std::vector<std::pair<long long, Detection>> out;
  out.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string p = "/" + std::to_string(i);
    const json& r = doc[i];
    Detection d;
    const long long image_id = integer(require(r, "image_id", source, p), source, p + "/image_id");
    d.box = parse_xywh(require(r, "bbox", source, p), source, p + "/bbox");
    d.class_id = r.contains("category_id")
                     ? static_cast<int>(integer(r["category_id"], source, p + "/category_id"))
                     : 0;
    d.score = r.contains("score") ? number(r["score"], source, p + "/score") : 1.0;
    if (d.score < 0.0 || d.score > 1.0) {
      throw Error(ErrorKind::structure, "score must lie in [0, 1]", where(source, p + "/score"));
    }
    out.emplace_back(image_id, d);
  }
  return out;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open file", path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::parse, e.what(), path.string());
  }
}

DatasetIndex load_dataset(const std::filesystem::path& annotations,
                          const std::optional<std::filesystem::path>& proposals,
                          const std::optional<std::filesystem::path>& detections) {
  DatasetIndex index = parse_coco(read_json_file(annotations), annotations.string());
  auto attach = [&](const std::filesystem::path& path, auto&& sink) {
    std::set<long long> dangling;
    for (auto& [image_id, det] : parse_results(read_json_file(path), path.string())) {
      const auto img = std::lower_bound(
          index.images.begin(), index.images.end(), image_id,
          [](const ImageRecord& r, long long v) { return r.id < v; });
      if (img == index.images.end() || img->id != image_id) {
        dangling.insert(image_id);
        continue;
      }
      det.box = clamp_box(det.box, img->size);
      sink(image_id, det);
    }
    if (!dangling.empty()) {
      throw Error(ErrorKind::structure, "results reference unknown image ids: " + list_ids(dangling),
                  path.string());
    }
  };
  if (proposals) {
    attach(*proposals, [&](long long id, const Detection& d) {
      index.proposals[id].push_back(Proposal{d.box, d.score});
    });
  }
  if (detections) {
    attach(*detections, [&](long long id, const Detection& d) { index.detections[id].push_back(d); });
  }
  return index;
}

json voc_to_coco(const std::vector<std::filesystem::path>& xml_files) {
  namespace pt = boost::property_tree;
  std::vector<std::filesystem::path> files = xml_files;
  std::sort(files.begin(), files.end());
  json images = json::array();
  json annotations = json::array();
  std::map<std::string, int> category_ids;
  std::vector<std::string> category_order;
  long long ann_id = 1;
  long long image_id = 1;
  for (const auto& file : files) {
    pt::ptree tree;
    try {
      pt::read_xml(file.string(), tree);
    } catch (const pt::xml_parser_error& e) {
      throw Error(ErrorKind::parse, e.what(), file.string());
    }
    const pt::ptree* root = tree.get_child_optional("annotation").get_ptr();
    if (!root) throw Error(ErrorKind::structure, "missing <annotation> root", file.string());
    try {
      const int width = root->get<int>("size.width");
      const int height = root->get<int>("size.height");
      images.push_back({{"id", image_id},
                        {"width", width},
                        {"height", height},
                        {"file_name", root->get<std::string>("filename", file.stem().string())}});
      for (const auto& [tag, obj] : *root) {
        if (tag != "object") continue;
        const std::string name = obj.get<std::string>("name");
        auto [it, inserted] =
            category_ids.emplace(name, static_cast<int>(category_ids.size()) + 1);
        if (inserted) category_order.push_back(name);
        const double x1 = obj.get<double>("bndbox.xmin");
        const double y1 = obj.get<double>("bndbox.ymin");
        const double x2 = obj.get<double>("bndbox.xmax");
        const double y2 = obj.get<double>("bndbox.ymax");
        annotations.push_back({{"id", ann_id++},
                               {"image_id", image_id},
                               {"category_id", it->second},
                               {"bbox", {x1, y1, x2 - x1, y2 - y1}},
                               {"area", (x2 - x1) * (y2 - y1)},
                               {"iscrowd", 0}});
      }
    } catch (const pt::ptree_error& e) {
      throw Error(ErrorKind::structure, e.what(), file.string());
    }
    ++image_id;
  }
  json categories = json::array();
  for (const std::string& name : category_order) {
    categories.push_back({{"id", category_ids[name]}, {"name", name}});
  }
  return json{{"images", images}, {"annotations", annotations}, {"categories", categories}};
}

}  // namespace scalenorm
