#pragma once

#include <algorithm>
#include <string>

#include "wunet/error.hpp"

namespace wunet {

// Axis-aligned boxes with right > left and bottom > top, in pixel units.
// image_id scopes boxes when detections from many images are pooled.

struct GtBox {
  int class_id = 0;
  double left = 0, top = 0, right = 0, bottom = 0;
  bool ignore = false;  // unmatched detections inside are not penalized
  std::string image_id;
};

struct Detection {
  int class_id = 0;
  double left = 0, top = 0, right = 0, bottom = 0;
  double confidence = 0.0;
  std::string image_id;
};

template <typename B>
double box_area(const B& b) {
  return (b.right - b.left) * (b.bottom - b.top);
}

template <typename A, typename B>
double intersection_area(const A& a, const B& b) {
  const double w = std::min(a.right, b.right) - std::max(a.left, b.left);
  const double h = std::min(a.bottom, b.bottom) - std::max(a.top, b.top);
  return w > 0.0 && h > 0.0 ? w * h : 0.0;
}

template <typename A, typename B>
double iou(const A& a, const B& b) {
  const double area_a = box_area(a);
  const double area_b = box_area(b);
  if (area_a <= 0.0 || area_b <= 0.0)
    throw ContractError("iou: degenerate box");
  const double inter = intersection_area(a, b);
  return inter / (area_a + area_b - inter);
}

}  // namespace wunet
