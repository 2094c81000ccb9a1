#pragma once

#include <cmath>
#include <deque>
#include <string>
#include <vector>

#include "wunet/boxes.hpp"
#include "wunet/image.hpp"

namespace wunet {

// Contrast-blob detector: the deterministic stand-in for a learned object
// detector at desk scale. Pixels whose luma deviates from the local box-filter
// mean by more than contrast_thresh are grouped into 4-connected components;
// each component above min_area becomes one detection. The raw component
// bounding box blooms about one pixel past a hard edge at the default
// thresholds, so boxes are deflated by bbox_deflate before emission.
// Confidence is the component's mean contrast; class is pedestrian when the
// box is at least ped_aspect times taller than wide, car otherwise.

struct BlobDetectorConfig {
  int radius = 4;                // box-filter radius for the local mean
  double contrast_thresh = 0.15; // minimum |luma - local mean|
  int min_area = 12;             // pixels per component
  int bbox_deflate = 1;          // shrink per side before emission
  double ped_aspect = 2.0;       // height/width ratio separating classes
};

inline std::vector<Detection> blob_detect(const Image& img,
                                          const BlobDetectorConfig& cfg = {},
                                          const std::string& image_id = "") {
  if (img.space != ColorSpace::RGB)
    throw ContractError("blob_detect: image must be RGB");
  const int w = img.width, h = img.height;
  if (w == 0 || h == 0) return {};

  std::vector<double> luma(img.pixel_count());
  for (std::size_t p = 0; p < luma.size(); ++p)
    luma[p] = (double(img.data[p * 3 + 0]) + double(img.data[p * 3 + 1]) +
               double(img.data[p * 3 + 2])) /
              3.0;

  // Integral image for clipped box-filter means.
  std::vector<double> integral(std::size_t(w + 1) * (h + 1), 0.0);
  for (int y = 0; y < h; ++y) {
    double row = 0.0;
    for (int x = 0; x < w; ++x) {
      row += luma[std::size_t(y) * w + x];
      integral[std::size_t(y + 1) * (w + 1) + (x + 1)] =
          integral[std::size_t(y) * (w + 1) + (x + 1)] + row;
    }
  }
  auto box_sum = [&](int x0, int y0, int x1, int y1) {  // inclusive coords
    return integral[std::size_t(y1 + 1) * (w + 1) + (x1 + 1)] -
           integral[std::size_t(y0) * (w + 1) + (x1 + 1)] -
           integral[std::size_t(y1 + 1) * (w + 1) + x0] +
           integral[std::size_t(y0) * (w + 1) + x0];
  };

  std::vector<double> contrast(luma.size());
  for (int y = 0; y < h; ++y) {
    const int y0 = std::max(0, y - cfg.radius), y1 = std::min(h - 1, y + cfg.radius);
    for (int x = 0; x < w; ++x) {
      const int x0 = std::max(0, x - cfg.radius), x1 = std::min(w - 1, x + cfg.radius);
      const double mean =
          box_sum(x0, y0, x1, y1) / (double(x1 - x0 + 1) * double(y1 - y0 + 1));
      contrast[std::size_t(y) * w + x] =
          std::abs(luma[std::size_t(y) * w + x] - mean);
    }
  }

  std::vector<char> mask(luma.size());
  for (std::size_t p = 0; p < luma.size(); ++p)
    mask[p] = contrast[p] >= cfg.contrast_thresh ? 1 : 0;

  // 4-connected components in raster order: deterministic discovery.
  std::vector<Detection> dets;
  std::vector<char> visited(luma.size(), 0);
  std::deque<std::size_t> queue;
  for (int sy = 0; sy < h; ++sy) {
    for (int sx = 0; sx < w; ++sx) {
      const std::size_t start = std::size_t(sy) * w + sx;
      if (!mask[start] || visited[start]) continue;
      visited[start] = 1;
      queue.clear();
      queue.push_back(start);
      int minx = sx, maxx = sx, miny = sy, maxy = sy;
      long area = 0;
      double contrast_acc = 0.0;
      while (!queue.empty()) {
        const std::size_t p = queue.front();
        queue.pop_front();
        const int x = int(p % std::size_t(w));
        const int y = int(p / std::size_t(w));
        ++area;
        contrast_acc += contrast[p];
        minx = std::min(minx, x);
        maxx = std::max(maxx, x);
        miny = std::min(miny, y);
        maxy = std::max(maxy, y);
        const int nx[4] = {x - 1, x + 1, x, x};
        const int ny[4] = {y, y, y - 1, y + 1};
        for (int k = 0; k < 4; ++k) {
          if (nx[k] < 0 || nx[k] >= w || ny[k] < 0 || ny[k] >= h) continue;
          const std::size_t q = std::size_t(ny[k]) * w + nx[k];
          if (mask[q] && !visited[q]) {
            visited[q] = 1;
            queue.push_back(q);
          }
        }
      }
      if (area < cfg.min_area) continue;
      double left = minx, top = miny, right = maxx + 1, bottom = maxy + 1;
      const double d = cfg.bbox_deflate;
      if (right - left > 2 * d + 1) {
        left += d;
        right -= d;
      }
      if (bottom - top > 2 * d + 1) {
        top += d;
        bottom -= d;
      }
      Detection det;
      det.left = left;
      det.top = top;
      det.right = right;
      det.bottom = bottom;
      det.confidence = std::min(1.0, contrast_acc / double(area));
      det.class_id =
          (bottom - top) >= cfg.ped_aspect * (right - left) ? 1 : 0;
      det.image_id = image_id;
      dets.push_back(det);
    }
  }

  // A contrast ring can fragment where it dips below threshold; absorb any
  // detection mostly contained in a larger one. Result order: area
  // descending.
  std::stable_sort(dets.begin(), dets.end(),
                   [](const Detection& a, const Detection& b) {
                     return box_area(a) > box_area(b);
                   });
  std::vector<Detection> kept;
  for (const auto& cand : dets) {
    bool contained = false;
    for (const auto& k : kept) {
      if (intersection_area(k, cand) > 0.5 * box_area(cand)) {
        contained = true;
        break;
      }
    }
    if (!contained) kept.push_back(cand);
  }
  return kept;
}

}  // namespace wunet
