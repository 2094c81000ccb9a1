#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "wunet/detector.hpp"
#include "wunet/kitti.hpp"
#include "wunet/manifest.hpp"
#include "wunet/metrics.hpp"
#include "wunet/model.hpp"
#include "wunet/parallel.hpp"

namespace wunet {

// Per-validation-set evaluation: optional WUNet preprocessing, detection,
// MSE against the clear reference, and AP/mAP accumulation over the whole
// set. MSE is always measured in RGB so reports stay comparable across
// model color spaces.

struct SetReport {
  std::string name;
  int images = 0;
  double mse = 0.0;
  double map = std::nan("");
  double ap_car = std::nan("");
  double ap_pedestrian = std::nan("");
};

// External detections keyed by image id (JSONL dump format). Lets offline
// detector outputs reuse this mAP harness.
using DetectionsById = std::map<std::string, std::vector<Detection>>;

inline void write_detections_jsonl(const std::vector<Detection>& dets,
                                   const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open " + path + " for writing");
  for (const auto& d : dets) {
    nlohmann::json j;
    j["image_id"] = d.image_id;
    j["class_id"] = d.class_id;
    j["left"] = d.left;
    j["top"] = d.top;
    j["right"] = d.right;
    j["bottom"] = d.bottom;
    j["confidence"] = d.confidence;
    out << j.dump() << "\n";
  }
  if (!out) throw DataError("write failed: " + path);
}

inline DetectionsById read_detections_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open detections " + path);
  DetectionsById by_id;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      Detection d;
      d.image_id = j.at("image_id").get<std::string>();
      d.class_id = j.at("class_id").get<int>();
      d.left = j.at("left").get<double>();
      d.top = j.at("top").get<double>();
      d.right = j.at("right").get<double>();
      d.bottom = j.at("bottom").get<double>();
      d.confidence = j.at("confidence").get<double>();
      by_id[d.image_id].push_back(d);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return by_id;
}

struct EvalOptions {
  BlobDetectorConfig detector;
  KittiClassTable classes = KittiClassTable::defaults();
  double iou_thresh = 0.5;
  int threads = 1;
  // Keys of external detections are "<prefix><record id>"; the prefix lets
  // one dump file cover several sets.
  std::string external_key_prefix;
};

inline SetReport evaluate_set(const std::string& name,
                              const std::vector<SampleRecord>& records,
                              const std::filesystem::path& base_dir,
                              const Model<float>* model,
                              const EvalOptions& opt = {},
                              const DetectionsById* external = nullptr) {
  SetReport report;
  report.name = name;
  report.images = int(records.size());
  if (records.empty()) return report;

  std::vector<double> mses(records.size(), 0.0);
  std::vector<std::vector<Detection>> dets_per(records.size());
  std::vector<std::vector<GtBox>> gts_per(records.size());

  parallel_for(records.size(), opt.threads, [&](std::size_t i) {
    const auto& rec = records[i];
    Image img = read_ppm(resolve_path(base_dir, rec.image_path));
    if (model) img = forward_image(*model, img);
    Image clear;
    try {
      clear = read_ppm(resolve_path(base_dir, rec.clear_ref));
    } catch (const Error& e) {
      throw DataError("record '" + rec.id + "': clear reference unavailable: " +
                      e.what());
    }
    mses[i] = image_mse(img, clear);
    if (external) {
      const auto it = external->find(opt.external_key_prefix + rec.id);
      if (it != external->end()) {
        dets_per[i] = it->second;
        for (auto& d : dets_per[i]) d.image_id = rec.id;
      }
    } else {
      dets_per[i] = blob_detect(img, opt.detector, rec.id);
    }
    if (rec.labels_path) {
      gts_per[i] = parse_kitti_labels(resolve_path(base_dir, *rec.labels_path),
                                      opt.classes, rec.id);
    }
  });

  double mse_acc = 0.0;
  std::vector<Detection> dets;
  std::vector<GtBox> gts;
  for (std::size_t i = 0; i < records.size(); ++i) {
    mse_acc += mses[i];
    dets.insert(dets.end(), dets_per[i].begin(), dets_per[i].end());
    gts.insert(gts.end(), gts_per[i].begin(), gts_per[i].end());
  }
  report.mse = mse_acc / double(records.size());

  bool any_gt = false;
  for (const auto& g : gts) any_gt = any_gt || !g.ignore;
  if (any_gt) {
    const auto ap = per_class_average_precision(dets, gts, opt.iou_thresh);
    double acc = 0.0;
    for (const auto& [cls, v] : ap) {
      acc += v;
      if (cls == 0) report.ap_car = v;
      if (cls == 1) report.ap_pedestrian = v;
    }
    report.map = acc / double(ap.size());
  }
  return report;
}

// ---------------------------------------------------------------------------
// Report CSV: one row per evaluated set per pipeline variant. A JSON sidecar
// records the scoring conventions next to the data.

namespace detail {

inline std::string format_metric(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace detail

inline void emit_report(const std::vector<SetReport>& reports,
                        const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open " + path + " for writing");
  out << "set,images,mse,map,ap_car,ap_pedestrian\n";
  for (const auto& r : reports) {
    out << r.name << "," << r.images << "," << detail::format_metric(r.mse)
        << "," << detail::format_metric(r.map) << ","
        << detail::format_metric(r.ap_car) << ","
        << detail::format_metric(r.ap_pedestrian) << "\n";
  }
  if (!out) throw DataError("write failed: " + path);

  nlohmann::json meta;
  meta["ap_interpolation"] = "all_points";
  meta["iou_threshold"] = 0.5;
  meta["mse_space"] = "rgb";
  std::ofstream ms(path + ".meta.json", std::ios::trunc);
  ms << meta.dump(2) << "\n";
}

}  // namespace wunet
