#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "wunet/boxes.hpp"
#include "wunet/error.hpp"

namespace wunet {

// KITTI object-label text format: whitespace-separated fields per line,
// field 1 the class string, fields 5-8 the box as left, top, right, bottom
// in pixels. "DontCare" lines become ignore regions; classes missing from
// the table are skipped.

struct KittiClassTable {
  std::map<std::string, int> name_to_id;

  static KittiClassTable defaults() {
    return KittiClassTable{{{"Car", 0}, {"Pedestrian", 1}}};
  }

  std::string name_of(int id) const {
    for (const auto& [name, cid] : name_to_id)
      if (cid == id) return name;
    return "Class" + std::to_string(id);
  }
};

inline std::vector<GtBox> parse_kitti_labels(
    const std::string& path,
    const KittiClassTable& table = KittiClassTable::defaults(),
    const std::string& image_id = "") {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open labels " + path);
  std::vector<GtBox> boxes;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::vector<std::string> fields;
    std::string tok;
    while (ss >> tok) fields.push_back(tok);
    if (fields.empty()) continue;
    if (fields.size() < 8)
      throw FormatError(path + ":" + std::to_string(lineno) +
                        ": expected at least 8 fields, got " +
                        std::to_string(fields.size()));
    GtBox box;
    try {
      box.left = std::stod(fields[4]);
      box.top = std::stod(fields[5]);
      box.right = std::stod(fields[6]);
      box.bottom = std::stod(fields[7]);
    } catch (const std::exception&) {
      throw FormatError(path + ":" + std::to_string(lineno) +
                        ": malformed box coordinates");
    }
    box.image_id = image_id;
    if (fields[0] == "DontCare") {
      box.ignore = true;
      box.class_id = -1;
      boxes.push_back(box);
      continue;
    }
    const auto it = table.name_to_id.find(fields[0]);
    if (it == table.name_to_id.end()) continue;
    box.class_id = it->second;
    boxes.push_back(box);
  }
  return boxes;
}

// Emits minimal 15-field KITTI lines (unused numeric fields zeroed).
inline void write_kitti_labels(
    const std::vector<GtBox>& boxes, const std::string& path,
    const KittiClassTable& table = KittiClassTable::defaults()) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open " + path + " for writing");
  char line[256];
  for (const auto& b : boxes) {
    const std::string name = b.ignore ? "DontCare" : table.name_of(b.class_id);
    std::snprintf(line, sizeof(line),
                  "%s 0.00 0 0.00 %.2f %.2f %.2f %.2f 0.00 0.00 0.00 0.00 "
                  "0.00 0.00 0.00\n",
                  name.c_str(), b.left, b.top, b.right, b.bottom);
    out << line;
  }
  if (!out) throw DataError("write failed: " + path);
}

}  // namespace wunet
