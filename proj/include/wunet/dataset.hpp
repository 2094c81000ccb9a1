#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "wunet/image.hpp"
#include "wunet/manifest.hpp"
#include "wunet/parallel.hpp"
#include "wunet/weather.hpp"

namespace wunet {

// Dataset construction: the 4x adverse-weather expansion, the ten graded
// validation sets, and crop-mode datasets. Record transformations are pure
// (paths and intensities only) so cardinalities and pairings can be checked
// without touching pixels; materialize_* renders and writes the files.

namespace fs_detail {
inline void ensure_dir(const std::filesystem::path& p) {
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec) throw DataError("cannot create directory " + p.string());
}
}  // namespace fs_detail

inline constexpr std::array<Variant, 3> kWeatherVariants = {
    Variant::Fog, Variant::Rain, Variant::Snow};

// ---------------------------------------------------------------------------
// Extension: each clear record becomes 4 records (clear + fog/rain/snow with
// per-image per-condition intensities drawn uniformly from [0.2, 1.0]). All
// four share the clear image as ground truth and the same labels file.

inline std::vector<SampleRecord> extend_records(
    const std::vector<SampleRecord>& clear_records, std::uint64_t seed) {
  std::vector<SampleRecord> out;
  out.reserve(clear_records.size() * 4);
  for (const auto& src : clear_records) {
    const std::string clear_path = "images/" + src.id + ".ppm";
    const std::string labels_path =
        src.labels_path ? "labels/" + src.id + ".txt" : "";

    SampleRecord clear;
    clear.id = src.id;
    clear.image_path = clear_path;
    clear.variant = Variant::Clear;
    clear.intensity = 0.0;
    clear.clear_ref = clear_path;
    if (src.labels_path) clear.labels_path = labels_path;
    clear.split = src.split;
    out.push_back(clear);

    for (Variant v : kWeatherVariants) {
      SampleRecord rec;
      rec.id = src.id + "_" + to_string(v);
      rec.image_path = "images/" + rec.id + ".ppm";
      rec.variant = v;
      rec.intensity =
          sample_train_intensity(derive_seed(seed, src.id, to_string(v)));
      rec.clear_ref = clear_path;
      if (src.labels_path) rec.labels_path = labels_path;
      rec.split = src.split;
      out.push_back(rec);
    }
  }
  return out;
}

inline std::vector<SampleRecord> extend_dataset(
    const std::vector<SampleRecord>& clear_records,
    const std::filesystem::path& base_dir, const std::filesystem::path& out_dir,
    std::uint64_t seed, int threads = 1) {
  namespace fs = std::filesystem;
  fs_detail::ensure_dir(out_dir / "images");
  bool any_labels = false;
  for (const auto& r : clear_records) any_labels = any_labels || bool(r.labels_path);
  if (any_labels) fs_detail::ensure_dir(out_dir / "labels");

  const auto records = extend_records(clear_records, seed);
  parallel_for(clear_records.size(), threads, [&](std::size_t i) {
    const auto& src = clear_records[i];
    const Image clear = read_ppm(resolve_path(base_dir, src.image_path));
    write_ppm(clear, (out_dir / "images" / (src.id + ".ppm")).string());
    if (src.labels_path) {
      fs::copy_file(resolve_path(base_dir, *src.labels_path),
                    out_dir / "labels" / (src.id + ".txt"),
                    fs::copy_options::overwrite_existing);
    }
    for (Variant v : kWeatherVariants) {
      const std::string id = src.id + "_" + to_string(v);
      WeatherSpec spec;
      spec.condition = variant_condition(v);
      spec.intensity = sample_train_intensity(derive_seed(seed, src.id, to_string(v)));
      spec.seed = derive_seed(seed, id);
      write_ppm(apply_weather(clear, spec),
                (out_dir / "images" / (id + ".ppm")).string());
    }
  });
  write_manifest(records, (out_dir / "manifest.jsonl").string());
  return records;
}

// ---------------------------------------------------------------------------
// Validation sets: `normal` plus {fog,rain,snow} x {low,medium,high}. Every
// set has the same cardinality as the input; weather sets draw a fresh
// intensity within the tier range per image and record the drawn value.

inline const std::vector<std::string>& validation_set_names() {
  static const std::vector<std::string> names = {
      "normal",   "fog_low",  "fog_medium",  "fog_high",  "rain_low",
      "rain_medium", "rain_high", "snow_low", "snow_medium", "snow_high"};
  return names;
}

inline std::vector<SampleRecord> validation_records(
    const std::vector<SampleRecord>& clear_records, const std::string& set_name,
    std::uint64_t seed) {
  std::vector<SampleRecord> out;
  out.reserve(clear_records.size());
  if (set_name == "normal") {
    for (const auto& src : clear_records) {
      SampleRecord rec;
      rec.id = src.id;
      rec.image_path = "normal/" + src.id + ".ppm";
      rec.variant = Variant::Clear;
      rec.intensity = 0.0;
      rec.clear_ref = rec.image_path;
      if (src.labels_path) rec.labels_path = "labels/" + src.id + ".txt";
      rec.split = Split::Val;
      out.push_back(rec);
    }
    return out;
  }
  const auto under = set_name.find('_');
  if (under == std::string::npos)
    throw ConfigError("unknown validation set '" + set_name + "'");
  const Variant variant = variant_from_string(set_name.substr(0, under));
  const Tier tier = tier_from_string(set_name.substr(under + 1));
  for (const auto& src : clear_records) {
    SampleRecord rec;
    rec.id = src.id;
    rec.image_path = set_name + "/" + src.id + ".ppm";
    rec.variant = variant;
    rec.tier = tier;
    rec.intensity =
        sample_intensity(tier, derive_seed(seed, set_name + "#intensity", src.id));
    rec.clear_ref = "normal/" + src.id + ".ppm";
    if (src.labels_path) rec.labels_path = "labels/" + src.id + ".txt";
    rec.split = Split::Val;
    out.push_back(rec);
  }
  return out;
}

struct ValidationSet {
  std::string name;
  std::vector<SampleRecord> records;
  std::string manifest_path;
};

inline std::vector<ValidationSet> build_validation_sets(
    const std::vector<SampleRecord>& clear_records,
    const std::filesystem::path& base_dir, const std::filesystem::path& out_dir,
    std::uint64_t seed, int threads = 1) {
  namespace fs = std::filesystem;
  if (clear_records.empty())
    throw DataError("build_validation_sets: empty clear test manifest");
  bool any_labels = false;
  for (const auto& r : clear_records) any_labels = any_labels || bool(r.labels_path);
  if (any_labels) fs_detail::ensure_dir(out_dir / "labels");

  std::vector<ValidationSet> sets;
  for (const auto& name : validation_set_names()) {
    fs_detail::ensure_dir(out_dir / name);
    ValidationSet set;
    set.name = name;
    set.records = validation_records(clear_records, name, seed);
    set.manifest_path = (out_dir / (name + ".jsonl")).string();
    sets.push_back(std::move(set));
  }

  // Clear images and labels are shared: copy them once via the normal set.
  parallel_for(clear_records.size(), threads, [&](std::size_t i) {
    const auto& src = clear_records[i];
    fs::copy_file(resolve_path(base_dir, src.image_path),
                  out_dir / "normal" / (src.id + ".ppm"),
                  fs::copy_options::overwrite_existing);
    if (src.labels_path)
      fs::copy_file(resolve_path(base_dir, *src.labels_path),
                    out_dir / "labels" / (src.id + ".txt"),
                    fs::copy_options::overwrite_existing);
  });
  for (const auto& set : sets) {
    if (set.name == "normal") continue;
    parallel_for(set.records.size(), threads, [&](std::size_t i) {
      const auto& rec = set.records[i];
      const Image clear = read_ppm((out_dir / "normal" / (rec.id + ".ppm")).string());
      WeatherSpec spec;
      spec.condition = variant_condition(rec.variant);
      spec.intensity = rec.intensity;
      spec.seed = derive_seed(seed, set.name, rec.id);
      write_ppm(apply_weather(clear, spec), (out_dir / rec.image_path).string());
    });
  }
  for (const auto& set : sets) write_manifest(set.records, set.manifest_path);
  return sets;
}

// ---------------------------------------------------------------------------
// Cropification: every record becomes cols x rows crop records; crop k of an
// augmented image pairs with crop k of its clear reference. Detection labels
// do not survive cropping and are dropped.

namespace detail {

inline std::string crop_id(const std::string& id, int k) {
  return id + "#c" + std::to_string(k);
}

// Crop stem for a clear_ref that is not itself a record image: a path hash.
inline std::string foreign_ref_stem(const std::string& clear_ref) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(clear_ref)));
  return "ref-" + std::string(buf);
}

// Crop image path for a clear_ref that may or may not belong to a record in
// the manifest: records' own images are keyed by id, foreign references by a
// path hash.
inline std::string crop_ref_path(
    const std::map<std::string, std::string>& path_to_id,
    const std::string& clear_ref, int k) {
  const auto it = path_to_id.find(clear_ref);
  const std::string stem =
      it != path_to_id.end() ? it->second : foreign_ref_stem(clear_ref);
  return "crops/" + crop_id(stem, k) + ".ppm";
}

}  // namespace detail

inline std::vector<SampleRecord> cropify_records(
    const std::vector<SampleRecord>& records, const CropGrid& grid) {
  std::map<std::string, std::string> path_to_id;
  for (const auto& r : records)
    if (r.image_path == r.clear_ref) path_to_id[r.image_path] = r.id;

  std::vector<SampleRecord> out;
  out.reserve(records.size() * std::size_t(grid.count()));
  for (const auto& r : records) {
    for (int k = 0; k < grid.count(); ++k) {
      SampleRecord c;
      c.id = detail::crop_id(r.id, k);
      c.image_path = "crops/" + c.id + ".ppm";
      c.variant = r.variant;
      c.intensity = r.intensity;
      c.tier = r.tier;
      c.clear_ref = detail::crop_ref_path(path_to_id, r.clear_ref, k);
      c.split = r.split;
      out.push_back(std::move(c));
    }
  }
  return out;
}

inline std::vector<SampleRecord> cropify_dataset(
    const std::vector<SampleRecord>& records,
    const std::filesystem::path& base_dir, const std::filesystem::path& out_dir,
    const CropGrid& grid, int threads = 1) {
  fs_detail::ensure_dir(out_dir / "crops");
  std::map<std::string, std::string> path_to_id;
  for (const auto& r : records)
    if (r.image_path == r.clear_ref) path_to_id[r.image_path] = r.id;

  // Distinct source images to split: every record image plus any clear_ref
  // not present as a record image.
  std::vector<std::pair<std::string, std::string>> sources;  // (src path, crop stem)
  std::map<std::string, bool> seen;
  for (const auto& r : records) {
    if (!seen.count(r.image_path)) {
      seen[r.image_path] = true;
      sources.emplace_back(r.image_path, r.id);
    }
  }
  for (const auto& r : records) {
    if (seen.count(r.clear_ref)) continue;
    seen[r.clear_ref] = true;
    sources.emplace_back(r.clear_ref, detail::foreign_ref_stem(r.clear_ref));
  }

  parallel_for(sources.size(), threads, [&](std::size_t i) {
    const auto& [src_path, stem] = sources[i];
    Image img;
    try {
      img = read_ppm(resolve_path(base_dir, src_path));
    } catch (const Error& e) {
      throw DataError(std::string("cropify: ") + e.what());
    }
    if (grid.cols * grid.crop_width != img.width ||
        grid.rows * grid.crop_height != img.height)
      throw DimensionError("cropify: grid does not divide " + src_path + " (" +
                           std::to_string(img.width) + "x" +
                           std::to_string(img.height) + ")");
    const auto crops = split_crops(img, grid);
    for (int k = 0; k < grid.count(); ++k) {
      write_ppm(crops[std::size_t(k)],
                (out_dir / "crops" / (detail::crop_id(stem, k) + ".ppm")).string());
    }
  });

  auto out = cropify_records(records, grid);
  write_manifest(out, (out_dir / "manifest.jsonl").string());
  return out;
}

}  // namespace wunet
