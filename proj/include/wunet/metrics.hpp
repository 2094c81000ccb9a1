#pragma once

#include <algorithm>
#include <iostream>
#include <map>
#include <set>
#include <vector>

#include "wunet/boxes.hpp"

namespace wunet {

// VOC-style average precision at a fixed IoU threshold with all-points
// interpolation (area under the precision envelope over recall). Matching is
// greedy in confidence order: each detection takes the highest-IoU unmatched
// ground-truth box of its image at IoU >= thresh. An unmatched detection
// whose overlap with an ignore region exceeds half its own area is discarded
// instead of counted as a false positive.

inline constexpr double kIgnoreOverlapFraction = 0.5;

namespace detail {

enum class DetFate { TruePositive, FalsePositive, Discarded };

// Confidence-ordered matching; returns one fate per detection in sorted
// order. gts may mix real and ignore boxes of a single class.
inline std::vector<DetFate> match_detections(std::vector<Detection>& dets,
                                             const std::vector<GtBox>& gts,
                                             double iou_thresh) {
  std::stable_sort(dets.begin(), dets.end(),
                   [](const Detection& a, const Detection& b) {
                     return a.confidence > b.confidence;
                   });
  std::vector<char> used(gts.size(), 0);
  std::vector<DetFate> fates;
  fates.reserve(dets.size());
  for (const auto& d : dets) {
    int best = -1;
    double best_iou = 0.0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (gts[g].ignore || used[g] || gts[g].image_id != d.image_id) continue;
      const double v = iou(d, gts[g]);
      if (v >= iou_thresh && v > best_iou) {
        best_iou = v;
        best = int(g);
      }
    }
    if (best >= 0) {
      used[std::size_t(best)] = 1;
      fates.push_back(DetFate::TruePositive);
      continue;
    }
    bool discard = false;
    const double det_area = box_area(d);
    for (const auto& g : gts) {
      if (!g.ignore || g.image_id != d.image_id) continue;
      if (intersection_area(d, g) > kIgnoreOverlapFraction * det_area) {
        discard = true;
        break;
      }
    }
    fates.push_back(discard ? DetFate::Discarded : DetFate::FalsePositive);
  }
  return fates;
}

// Area under the precision envelope; points must be in detection order
// (recall nondecreasing).
inline double envelope_area(const std::vector<double>& recall,
                            const std::vector<double>& precision) {
  const std::size_t n = recall.size();
  std::vector<double> pmax(n);
  double running = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    running = std::max(running, precision[i]);
    pmax[i] = running;
  }
  double ap = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ap += (recall[i] - prev) * pmax[i];
    prev = recall[i];
  }
  return ap;
}

}  // namespace detail

// Single-class AP. Detections may span many images; boxes are grouped by
// image_id. Edge conventions: no ground truth and some detections -> 0; no
// ground truth and no detections -> 1 (noted on stderr).
inline double average_precision(std::vector<Detection> dets,
                                const std::vector<GtBox>& gts,
                                double iou_thresh = 0.5) {
  std::size_t n_pos = 0;
  for (const auto& g : gts)
    if (!g.ignore) ++n_pos;
  if (n_pos == 0) {
    if (dets.empty()) {
      std::cerr << "average_precision: no ground truth and no detections; "
                   "defining AP = 1\n";
      return 1.0;
    }
    return 0.0;
  }
  const auto fates = detail::match_detections(dets, gts, iou_thresh);
  std::vector<double> recall, precision;
  recall.reserve(fates.size());
  precision.reserve(fates.size());
  long tp = 0, fp = 0;
  for (const auto fate : fates) {
    if (fate == detail::DetFate::Discarded) continue;
    if (fate == detail::DetFate::TruePositive)
      ++tp;
    else
      ++fp;
    recall.push_back(double(tp) / double(n_pos));
    precision.push_back(double(tp) / double(tp + fp));
  }
  return detail::envelope_area(recall, precision);
}

// Per-class AP over every class with at least one non-ignore ground-truth
// box. Ignore regions are class-free and shared by all classes.
inline std::map<int, double> per_class_average_precision(
    const std::vector<Detection>& dets, const std::vector<GtBox>& gts,
    double iou_thresh = 0.5) {
  std::set<int> classes;
  std::vector<GtBox> ignores;
  for (const auto& g : gts) {
    if (g.ignore)
      ignores.push_back(g);
    else
      classes.insert(g.class_id);
  }
  std::map<int, double> ap;
  for (int cls : classes) {
    std::vector<Detection> dets_c;
    for (const auto& d : dets)
      if (d.class_id == cls) dets_c.push_back(d);
    std::vector<GtBox> gts_c = ignores;
    for (const auto& g : gts)
      if (!g.ignore && g.class_id == cls) gts_c.push_back(g);
    ap[cls] = average_precision(std::move(dets_c), gts_c, iou_thresh);
  }
  return ap;
}

// Unweighted mean of per-class AP. Requires ground truth for at least one
// class.
inline double mean_average_precision(const std::vector<Detection>& dets,
                                     const std::vector<GtBox>& gts,
                                     double iou_thresh = 0.5) {
  const auto ap = per_class_average_precision(dets, gts, iou_thresh);
  if (ap.empty())
    throw ContractError("mean_average_precision: no ground-truth boxes");
  double acc = 0.0;
  for (const auto& [cls, v] : ap) acc += v;
  return acc / double(ap.size());
}

}  // namespace wunet
