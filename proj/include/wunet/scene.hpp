#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "wunet/boxes.hpp"
#include "wunet/error.hpp"
#include "wunet/image.hpp"
#include "wunet/rng.hpp"

namespace wunet {

// Synthetic road-scene generator: a textured gray background with
// high-contrast filled rectangles. Wide boxes play cars, thin vertical boxes
// play pedestrians. Rendering writes exactly the pixels inside each box, so
// the returned ground truth encloses its rectangle by construction and the
// whole scene is a pure function of the spec.

struct SceneObject {
  int class_id = 0;  // 0 car, 1 pedestrian
  int left = 0, top = 0, right = 0, bottom = 0;
  double fill = 0.9;
};

struct SceneSpec {
  std::uint64_t seed = 0;
  int width = 128;
  int height = 64;
  int n_objects = 3;
  std::vector<SceneObject> objects;  // when empty, sampled from the seed
  double background_base = 0.45;
  double background_amplitude = 0.2;
  double noise_cell = 32.0;
  double max_overlap_iou = 0.05;
  int min_separation = 4;  // clearance in pixels between placed boxes
};

struct GeneratedScene {
  Image image;
  std::vector<GtBox> boxes;
};

namespace detail {

inline SceneObject sample_scene_object(Rng& rng, const SceneSpec& spec) {
  SceneObject obj;
  obj.class_id = rng.next_double() < 0.5 ? 0 : 1;
  int w, h;
  if (obj.class_id == 0) {
    // Cars: wide boxes, never taller than wide.
    const int wmin = std::max(5, spec.width / 6);
    const int wmax = std::max(wmin, spec.width / 3);
    w = int(rng.uniform_int(wmin, wmax));
    const int hmin = std::max(3, spec.height / 6);
    const int hmax = std::max(hmin, std::min(spec.height / 3, w));
    h = int(rng.uniform_int(hmin, hmax));
  } else {
    // Pedestrians: thin boxes at least 2.4x taller than wide.
    w = int(rng.uniform_int(std::max(3, spec.width / 18),
                            std::max(4, spec.width / 11)));
    int hmin = int(std::ceil(2.4 * w));
    int hmax = std::min(spec.height - 4, int(3.5 * w));
    if (hmax < hmin) {
      w = std::max(3, (spec.height - 4) / 3);
      hmin = int(std::ceil(2.4 * w));
      hmax = std::min(spec.height - 4, int(3.5 * w));
    }
    h = int(rng.uniform_int(hmin, std::max(hmin, hmax)));
  }
  w = std::min(w, spec.width - 4);
  h = std::min(h, spec.height - 4);
  obj.left = int(rng.uniform_int(2, spec.width - 2 - w));
  obj.top = int(rng.uniform_int(2, spec.height - 2 - h));
  obj.right = obj.left + w;
  obj.bottom = obj.top + h;
  // Bright or dark against the mid-gray background, 50/50.
  obj.fill = rng.next_double() < 0.5 ? rng.uniform(0.85, 1.0)
                                     : rng.uniform(0.0, 0.1);
  return obj;
}

}  // namespace detail

inline GeneratedScene generate_scene(const SceneSpec& spec) {
  if (spec.width < 8 || spec.height < 8)
    throw ConfigError("scene must be at least 8x8");

  GeneratedScene scene;
  scene.image = Image::zeros(spec.width, spec.height, ColorSpace::RGB);
  const std::uint64_t bg_seed = derive_seed(spec.seed, "background");
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const double n = value_noise(x, y, bg_seed, 3, spec.noise_cell);
      const float v = float(std::clamp(
          spec.background_base + spec.background_amplitude * (2.0 * n - 1.0),
          0.0, 1.0));
      for (int c = 0; c < 3; ++c) scene.image.at(x, y, c) = v;
    }
  }

  std::vector<SceneObject> objects = spec.objects;
  if (objects.empty() && spec.n_objects > 0) {
    Rng rng(derive_seed(spec.seed, "objects"));
    for (int i = 0; i < spec.n_objects; ++i) {
      bool placed = false;
      for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
        SceneObject cand = detail::sample_scene_object(rng, spec);
        bool overlaps = false;
        for (const auto& o : objects) {
          // Enforce both the IoU cap and a clearance gap so contrast blobs
          // of neighboring objects never bridge.
          GtBox a{0, double(cand.left - spec.min_separation),
                  double(cand.top - spec.min_separation),
                  double(cand.right + spec.min_separation),
                  double(cand.bottom + spec.min_separation), false, ""};
          GtBox b{0, double(o.left), double(o.top), double(o.right),
                  double(o.bottom), false, ""};
          if (intersection_area(a, b) > 0.0 || iou(a, b) > spec.max_overlap_iou) {
            overlaps = true;
            break;
          }
        }
        if (!overlaps) {
          objects.push_back(cand);
          placed = true;
        }
      }
      if (!placed)
        throw ConfigError("generate_scene: could not place object " +
                          std::to_string(i) + " after 100 attempts");
    }
  }

  for (const auto& o : objects) {
    if (o.left < 0 || o.top < 0 || o.right > spec.width ||
        o.bottom > spec.height || o.right <= o.left || o.bottom <= o.top)
      throw ConfigError("scene object out of bounds");
    for (int y = o.top; y < o.bottom; ++y)
      for (int x = o.left; x < o.right; ++x)
        for (int c = 0; c < 3; ++c) scene.image.at(x, y, c) = float(o.fill);
    scene.boxes.push_back(GtBox{o.class_id, double(o.left), double(o.top),
                                double(o.right), double(o.bottom), false, ""});
  }
  return scene;
}

}  // namespace wunet
