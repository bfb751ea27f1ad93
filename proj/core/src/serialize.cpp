#include "scalenorm/serialize.hpp"

#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "scalenorm/error.hpp"

namespace scalenorm {

using nlohmann::json;

json box_to_json(const Box& b) { return json::array({b.x1, b.y1, b.x2, b.y2}); }

Box box_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) {
    throw Error(ErrorKind::structure, "box must be [x1, y1, x2, y2]");
  }
  return Box{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

json chip_to_json(const Chip& chip) {
  json cropped = json::array();
  for (const CroppedGt& c : chip.cropped_gt) {
    cropped.push_back({{"gt_id", c.gt_id}, {"box", box_to_json(c.box)}});
  }
  return {{"image_id", chip.image_id},
          {"scale_id", chip.scale_id},
          {"rect", box_to_json(chip.rect)},
          {"kind", to_string(chip.kind)},
          {"covered_gt_ids", chip.covered_gt_ids},
          {"cropped_gt", cropped}};
}

Chip chip_from_json(const json& j) {
  try {
    Chip c;
    c.image_id = j.at("image_id").get<long long>();
    c.scale_id = j.at("scale_id").get<int>();
    c.rect = box_from_json(j.at("rect"));
    c.kind = chip_kind_from_string(j.at("kind").get<std::string>());
    c.covered_gt_ids = j.value("covered_gt_ids", std::vector<int>{});
    if (j.contains("cropped_gt")) {
      for (const json& e : j["cropped_gt"]) {
        c.cropped_gt.push_back(CroppedGt{e.at("gt_id").get<int>(), box_from_json(e.at("box"))});
      }
    }
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::structure, std::string("chip record: ") + e.what());
  }
}

json chip_set_to_json(const ChipSet& set) {
  json chips = json::array();
  for (const Chip& c : set.chips) chips.push_back(chip_to_json(c));
  json too_large = json::array();
  for (const auto& [image_id, u] : set.too_large) {
    too_large.push_back({{"image_id", image_id},
                         {"scale_id", u.scale_id},
                         {"gt_id", u.gt_id},
                         {"box", box_to_json(u.box)}});
  }
  return {{"chips", chips}, {"too_large", too_large}};
}

ChipSet chip_set_from_json(const json& j) {
  ChipSet set;
  try {
    for (const json& c : j.at("chips")) set.chips.push_back(chip_from_json(c));
    if (j.contains("too_large")) {
      for (const json& e : j["too_large"]) {
        set.too_large.emplace_back(
            e.at("image_id").get<long long>(),
            UncoverableGt{e.at("scale_id").get<int>(), e.at("gt_id").get<int>(),
                          box_from_json(e.at("box"))});
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::structure, std::string("chip set: ") + e.what());
  }
  return set;
}

json detection_to_json(long long image_id, const Detection& d) {
  return {{"image_id", image_id},
          {"category_id", d.class_id},
          {"bbox", {d.box.x1, d.box.y1, d.box.width(), d.box.height()}},
          {"score", d.score}};
}

namespace {

constexpr char kMagic[4] = {'S', 'N', 'M', 'P'};
constexpr std::size_t kHeaderBytes = 20;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::uint32_t get_u32(std::string_view in, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[offset + i])) << (8 * i);
  }
  return v;
}

template <typename T>
std::string encode(const Grid<T>& g, MapDtype dtype) {
  std::string out(kMagic, 4);
  put_u32(out, static_cast<std::uint32_t>(g.width()));
  put_u32(out, static_cast<std::uint32_t>(g.height()));
  put_u32(out, static_cast<std::uint32_t>(g.stride()));
  put_u32(out, static_cast<std::uint32_t>(dtype));
  for (T v : g.cells()) {
    if constexpr (std::is_same_v<T, float>) {
      std::uint32_t bits;
      std::memcpy(&bits, &v, sizeof bits);
      put_u32(out, bits);
    } else {
      out.push_back(static_cast<char>(v));
    }
  }
  return out;
}

std::size_t cell_bytes(MapDtype d) { return d == MapDtype::float32 ? 4 : 1; }

}  // namespace

std::string encode_map(const Grid<std::int8_t>& g) { return encode(g, MapDtype::int8); }
std::string encode_map(const Grid<std::uint8_t>& g) { return encode(g, MapDtype::uint8); }
std::string encode_map(const Grid<float>& g) { return encode(g, MapDtype::float32); }

MapHeader decode_map_header(std::string_view bytes) {
  if (bytes.size() < kHeaderBytes || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorKind::parse, "not a map file (bad magic or short header)");
  }
  MapHeader h;
  h.width = get_u32(bytes, 4);
  h.height = get_u32(bytes, 8);
  h.stride = get_u32(bytes, 12);
  const std::uint32_t dtype = get_u32(bytes, 16);
  if (dtype > 2) throw Error(ErrorKind::parse, "unknown map dtype " + std::to_string(dtype));
  h.dtype = static_cast<MapDtype>(dtype);
  if (h.stride == 0) throw Error(ErrorKind::parse, "map stride must be >= 1");
  const std::size_t expected =
      kHeaderBytes + static_cast<std::size_t>(h.width) * h.height * cell_bytes(h.dtype);
  if (bytes.size() != expected) {
    throw Error(ErrorKind::parse, "map payload size does not match its header");
  }
  return h;
}

Grid<std::int8_t> decode_label_map(std::string_view bytes) {
  const MapHeader h = decode_map_header(bytes);
  if (h.dtype != MapDtype::int8) throw Error(ErrorKind::parse, "label map must have dtype int8");
  Grid<std::int8_t> g(static_cast<int>(h.width), static_cast<int>(h.height),
                      static_cast<int>(h.stride));
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.cells()[i] = static_cast<std::int8_t>(bytes[kHeaderBytes + i]);
  }
  return g;
}

Grid<float> decode_probability_map(std::string_view bytes) {
  const MapHeader h = decode_map_header(bytes);
  Grid<float> g(static_cast<int>(h.width), static_cast<int>(h.height), static_cast<int>(h.stride));
  for (std::size_t i = 0; i < g.size(); ++i) {
    float v = 0.0f;
    switch (h.dtype) {
      case MapDtype::float32: {
        const std::uint32_t bits = get_u32(bytes, kHeaderBytes + 4 * i);
        std::memcpy(&v, &bits, sizeof v);
        break;
      }
      case MapDtype::int8:
        v = static_cast<float>(static_cast<std::int8_t>(bytes[kHeaderBytes + i]));
        break;
      case MapDtype::uint8:
        v = static_cast<float>(static_cast<unsigned char>(bytes[kHeaderBytes + i]));
        break;
    }
    if (!(v >= 0.0f && v <= 1.0f)) {
      throw Error(ErrorKind::parse, "probability map cell outside [0, 1]");
    }
    g.cells()[i] = v;
  }
  return g;
}

json map_to_json(const Grid<std::int8_t>& g) {
  std::vector<int> cells(g.cells().begin(), g.cells().end());
  return {{"width", g.width()}, {"height", g.height()}, {"stride", g.stride()},
          {"dtype", "int8"},    {"cells", cells}};
}

json map_to_json(const Grid<float>& g) {
  std::vector<float> cells(g.cells().begin(), g.cells().end());
  return {{"width", g.width()}, {"height", g.height()}, {"stride", g.stride()},
          {"dtype", "float32"}, {"cells", cells}};
}

namespace {

template <typename T>
Grid<T> grid_from_json(const json& j) {
  try {
    Grid<T> g(j.at("width").get<int>(), j.at("height").get<int>(), j.at("stride").get<int>());
    const json& cells = j.at("cells");
    if (!cells.is_array() || cells.size() != g.size()) {
      throw Error(ErrorKind::structure, "map cells do not match width * height");
    }
    for (std::size_t i = 0; i < g.size(); ++i) g.cells()[i] = cells[i].get<T>();
    return g;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::structure, std::string("map: ") + e.what());
  }
}

}  // namespace

Grid<float> probability_map_from_json(const json& j) {
  Grid<float> g = grid_from_json<float>(j);
  for (float v : g.cells()) {
    if (!(v >= 0.0f && v <= 1.0f)) {
      throw Error(ErrorKind::structure, "probability map cell outside [0, 1]");
    }
  }
  return g;
}

Grid<std::int8_t> label_map_from_json(const json& j) {
  Grid<int> wide = grid_from_json<int>(j);
  Grid<std::int8_t> g(wide.width(), wide.height(), wide.stride());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const int v = wide.cells()[i];
    if (v < -1 || v > 1) throw Error(ErrorKind::structure, "label map cell outside {-1, 0, 1}");
    g.cells()[i] = static_cast<std::int8_t>(v);
  }
  return g;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open file", path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  namespace fs = std::filesystem;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::random_device rd;
  const fs::path tmp = dir / ("." + path.filename().string() + ".tmp" + std::to_string(rd()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot create file", tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error(ErrorKind::io, "write failed", tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorKind::io, "cannot move output into place", path.string());
  }
}

}  // namespace scalenorm
