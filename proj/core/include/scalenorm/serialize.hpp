#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "scalenorm/focus_labels.hpp"
#include "scalenorm/geometry.hpp"
#include "scalenorm/sniper_chips.hpp"

namespace scalenorm {

nlohmann::json box_to_json(const Box& b);  // [x1, y1, x2, y2]
Box box_from_json(const nlohmann::json& j);

/// {image_id, scale_id, rect, kind, covered_gt_ids, cropped_gt: [{gt_id, box}]}
nlohmann::json chip_to_json(const Chip& chip);
Chip chip_from_json(const nlohmann::json& j);

/// {"chips": [...], "too_large": [{image_id, scale_id, gt_id, box}]}
struct ChipSet {
  std::vector<Chip> chips;
  std::vector<std::pair<long long, UncoverableGt>> too_large;

  friend bool operator==(const ChipSet& a, const ChipSet& b) {
    if (a.chips != b.chips || a.too_large.size() != b.too_large.size()) return false;
    for (std::size_t i = 0; i < a.too_large.size(); ++i) {
      const auto& [ia, ua] = a.too_large[i];
      const auto& [ib, ub] = b.too_large[i];
      if (ia != ib || ua.scale_id != ub.scale_id || ua.gt_id != ub.gt_id || !(ua.box == ub.box)) {
        return false;
      }
    }
    return true;
  }
};
nlohmann::json chip_set_to_json(const ChipSet& set);
ChipSet chip_set_from_json(const nlohmann::json& j);

/// COCO-results record {image_id, category_id, bbox: [x, y, w, h], score}.
nlohmann::json detection_to_json(long long image_id, const Detection& d);

/// Dense map file: 4-byte magic "SNMP", then little-endian uint32 width,
/// height, stride, dtype, followed by width*height row-major cells.
enum class MapDtype : std::uint32_t { int8 = 0, uint8 = 1, float32 = 2 };

std::string encode_map(const Grid<std::int8_t>& g);
std::string encode_map(const Grid<std::uint8_t>& g);
std::string encode_map(const Grid<float>& g);

/// Header of an encoded map, validated against the payload size.
struct MapHeader {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t stride = 0;
  MapDtype dtype = MapDtype::int8;
};
MapHeader decode_map_header(std::string_view bytes);
Grid<std::int8_t> decode_label_map(std::string_view bytes);
/// Accepts float32 maps as is and int8/uint8 maps cast to float.
Grid<float> decode_probability_map(std::string_view bytes);

/// JSON debug form {width, height, stride, dtype, cells: [...]}.
nlohmann::json map_to_json(const Grid<std::int8_t>& g);
nlohmann::json map_to_json(const Grid<float>& g);
Grid<float> probability_map_from_json(const nlohmann::json& j);
Grid<std::int8_t> label_map_from_json(const nlohmann::json& j);

std::string read_file(const std::filesystem::path& path);

/// Writes to a temporary sibling then renames over the target, so readers
/// never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace scalenorm
