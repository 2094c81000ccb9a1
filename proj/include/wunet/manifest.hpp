#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wunet/error.hpp"
#include "wunet/weather.hpp"

namespace wunet {

// Manifests are line-delimited JSON: one SampleRecord object per line. Paths
// are stored relative to the manifest's directory so a dataset tree can be
// moved or compared byte-for-byte across runs.

enum class Variant { Clear, Fog, Rain, Snow };

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::Clear: return "clear";
    case Variant::Fog: return "fog";
    case Variant::Rain: return "rain";
    default: return "snow";
  }
}

inline Variant variant_from_string(const std::string& s) {
  if (s == "clear") return Variant::Clear;
  if (s == "fog") return Variant::Fog;
  if (s == "rain") return Variant::Rain;
  if (s == "snow") return Variant::Snow;
  throw FormatError("unknown variant '" + s + "'");
}

inline Condition variant_condition(Variant v) {
  switch (v) {
    case Variant::Clear: return Condition::None;
    case Variant::Fog: return Condition::Fog;
    case Variant::Rain: return Condition::Rain;
    default: return Condition::Snow;
  }
}

enum class Split { Train, Test, Val };

inline const char* to_string(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Test: return "test";
    default: return "val";
  }
}

inline Split split_from_string(const std::string& s) {
  if (s == "train") return Split::Train;
  if (s == "test") return Split::Test;
  if (s == "val") return Split::Val;
  throw FormatError("unknown split '" + s + "'");
}

struct SampleRecord {
  std::string id;
  std::string image_path;
  Variant variant = Variant::Clear;
  double intensity = 0.0;
  std::optional<Tier> tier;
  std::string clear_ref;
  std::optional<std::string> labels_path;
  Split split = Split::Train;

  bool operator==(const SampleRecord&) const = default;
};

inline nlohmann::json to_json(const SampleRecord& r) {
  nlohmann::json j;
  j["id"] = r.id;
  j["image_path"] = r.image_path;
  j["variant"] = to_string(r.variant);
  j["intensity"] = r.intensity;
  if (r.tier) j["tier"] = to_string(*r.tier);
  j["clear_ref"] = r.clear_ref;
  if (r.labels_path) j["labels_path"] = *r.labels_path;
  j["split"] = to_string(r.split);
  return j;
}

inline SampleRecord record_from_json(const nlohmann::json& j) {
  SampleRecord r;
  r.id = j.at("id").get<std::string>();
  r.image_path = j.at("image_path").get<std::string>();
  r.variant = variant_from_string(j.at("variant").get<std::string>());
  r.intensity = j.at("intensity").get<double>();
  if (j.contains("tier")) r.tier = tier_from_string(j.at("tier").get<std::string>());
  r.clear_ref = j.at("clear_ref").get<std::string>();
  if (j.contains("labels_path")) r.labels_path = j.at("labels_path").get<std::string>();
  r.split = split_from_string(j.at("split").get<std::string>());
  return r;
}

inline void write_manifest(const std::vector<SampleRecord>& records,
                           const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open " + path + " for writing");
  for (const auto& r : records) out << to_json(r).dump() << "\n";
  if (!out) throw DataError("write failed: " + path);
}

inline std::vector<SampleRecord> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest " + path);
  std::vector<SampleRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      records.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return records;
}

// Resolve a manifest-relative path against the manifest's directory.
inline std::string resolve_path(const std::filesystem::path& base_dir,
                                const std::string& rel) {
  std::filesystem::path p(rel);
  if (p.is_absolute()) return p.string();
  return (base_dir / p).string();
}

}  // namespace wunet
