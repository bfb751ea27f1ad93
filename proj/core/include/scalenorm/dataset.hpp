#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scalenorm/geometry.hpp"
#include "scalenorm/sniper_chips.hpp"

namespace scalenorm {

struct ImageRecord {
  long long id = 0;
  ImageSize size;
  std::string file_name;
};

/// COCO-style dataset held in memory. Boxes are in corner form, original frame.
/// Ground truths of an image keep file order; chip records index into it.
struct DatasetIndex {
  std::vector<ImageRecord> images;  // ascending id
  std::map<long long, std::vector<GroundTruth>> annotations;
  std::map<long long, std::vector<Proposal>> proposals;
  std::map<long long, std::vector<Detection>> detections;
  std::map<int, std::string> categories;
  std::size_t clamped_boxes = 0;  // boxes that stuck out of their image

  const ImageRecord& image(long long id) const;
  const std::vector<GroundTruth>& gts(long long id) const;
  std::vector<AnnotatedImage> annotated() const;
};

/// Parses a COCO annotation document. `source` names the input in errors.
DatasetIndex parse_coco(const nlohmann::json& doc, const std::string& source = {});

/// COCO-results records: [{image_id, category_id, bbox: [x, y, w, h], score}].
std::vector<std::pair<long long, Detection>> parse_results(const nlohmann::json& doc,
                                                           const std::string& source = {});

nlohmann::json read_json_file(const std::filesystem::path& path);

/// Loads annotations plus optional proposal / detection result files.
/// Result records must reference images present in the annotation file.
DatasetIndex load_dataset(const std::filesystem::path& annotations,
                          const std::optional<std::filesystem::path>& proposals = std::nullopt,
                          const std::optional<std::filesystem::path>& detections = std::nullopt);

/// PASCAL VOC XML annotation files converted to a COCO document. Image ids
/// follow the sorted file order starting at 1; categories are numbered in
/// order of first appearance starting at 1.
nlohmann::json voc_to_coco(const std::vector<std::filesystem::path>& xml_files);

}  // namespace scalenorm
