#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "wunet/error.hpp"
#include "wunet/image.hpp"
#include "wunet/rng.hpp"

namespace wunet {

// Procedural fog, rain, and snow. Every operation is a pure function of
// (image, intensity, seed): identical inputs give bitwise-identical outputs,
// outputs stay in [0,1], and t = 0 returns the input unchanged. Per-streak
// and per-flake parameters are keyed by element index, so raising t extends
// the element set without redrawing the existing ones.

enum class Condition { None, Fog, Rain, Snow };

inline const char* to_string(Condition c) {
  switch (c) {
    case Condition::None: return "none";
    case Condition::Fog: return "fog";
    case Condition::Rain: return "rain";
    default: return "snow";
  }
}

inline Condition condition_from_string(const std::string& s) {
  if (s == "none") return Condition::None;
  if (s == "fog") return Condition::Fog;
  if (s == "rain") return Condition::Rain;
  if (s == "snow") return Condition::Snow;
  throw ConfigError("unknown weather condition '" + s + "'");
}

struct WeatherSpec {
  Condition condition = Condition::None;
  double intensity = 0.0;
  std::uint64_t seed = 0;
};

inline void validate(const WeatherSpec& spec) {
  if (spec.intensity < 0.0 || spec.intensity > 1.0)
    throw ContractError("weather intensity must lie in [0,1]");
  if (spec.condition == Condition::None && spec.intensity != 0.0)
    throw ContractError("condition none requires intensity 0");
}

// Severity buckets used to build the graded validation sets.
enum class Tier { Low, Medium, High };

struct TierRange {
  double lo;
  double hi;
};

inline TierRange tier_range(Tier t) {
  switch (t) {
    case Tier::Low: return {0.2, 0.4};
    case Tier::Medium: return {0.4, 0.7};
    default: return {0.7, 1.0};
  }
}

inline const char* to_string(Tier t) {
  switch (t) {
    case Tier::Low: return "low";
    case Tier::Medium: return "medium";
    default: return "high";
  }
}

inline Tier tier_from_string(const std::string& s) {
  if (s == "low") return Tier::Low;
  if (s == "medium") return Tier::Medium;
  if (s == "high") return Tier::High;
  throw ConfigError("unknown adversity tier '" + s + "'");
}

// Draws used when materializing datasets: tiers sample within their range,
// the training set samples the full adverse span [0.2, 1.0].
inline double sample_intensity(Tier tier, std::uint64_t rng_seed) {
  const TierRange r = tier_range(tier);
  return Rng(rng_seed).uniform(r.lo, r.hi);
}

inline constexpr double kTrainIntensityLo = 0.2;
inline constexpr double kTrainIntensityHi = 1.0;

inline double sample_train_intensity(std::uint64_t rng_seed) {
  return Rng(rng_seed).uniform(kTrainIntensityLo, kTrainIntensityHi);
}

// ---------------------------------------------------------------------------
// Tuning defaults. All constants of the generative models live here.

struct FogParams {
  double airlight = 0.92;      // ambient color the scene fades toward
  double extinction = 4.0;     // k = extinction * t
  double noise_cell = 32.0;    // octave-0 cell size of the depth noise
  int noise_octaves = 3;
};

struct RainParams {
  double density = 300.0;      // streaks per area_ref pixels at t = 1
  double area_ref = 128000.0;
  double brightness = 0.25;    // additive peak per streak
  double length_min = 8.0;
  double length_span = 12.0;   // max extra length at t = 1
  double angle_min_deg = 75.0; // from horizontal
  double angle_max_deg = 85.0;
  double desat_blend = 0.10;   // blend toward gray at t = 1
};

struct SnowParams {
  double density = 200.0;      // flakes per area_ref pixels at t = 1
  double area_ref = 128000.0;
  double peak_alpha = 0.9;
  double radius_min = 1.0;
  double radius_max = 3.0;
  double veil = 0.3;           // uniform white veil strength at t = 1
};

struct WeatherParams {
  FogParams fog;
  RainParams rain;
  SnowParams snow;
};

// ---------------------------------------------------------------------------
// Fog: Koschmieder-style blend toward the airlight. Per-pixel depth proxy
// d(x,y) = 0.5 + 0.5 * noise(x,y) and transmission tau = exp(-k*d).

inline double fog_transmission(double t, double depth,
                               const FogParams& p = {}) {
  return std::exp(-p.extinction * t * depth);
}

inline Image apply_fog(const Image& img, double t, std::uint64_t seed,
                       const FogParams& p = {}) {
  if (t < 0.0 || t > 1.0) throw ContractError("fog intensity must lie in [0,1]");
  if (t == 0.0) return img;
  Image out = img;
  const std::uint64_t noise_seed = derive_seed(seed, "fog-depth");
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const double n =
          value_noise(x, y, noise_seed, p.noise_octaves, p.noise_cell);
      const double tau = fog_transmission(t, 0.5 + 0.5 * n, p);
      for (int c = 0; c < 3; ++c) {
        const double v = img.at(x, y, c);
        out.at(x, y, c) = float(tau * v + (1.0 - tau) * p.airlight);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rain: n = round(density * t * area/area_ref) anti-aliased bright streaks
// followed by a blend toward the per-pixel channel mean. The desaturation
// step preserves each pixel's channel mean exactly, so the image mean can
// only move up (streaks are additive).

inline long rain_streak_count(double t, int width, int height,
                              const RainParams& p = {}) {
  return std::llround(p.density * t * (double(width) * height / p.area_ref));
}

namespace detail {

inline double point_segment_dist(double px, double py, double ax, double ay,
                                 double bx, double by) {
  const double dx = bx - ax;
  const double dy = by - ay;
  const double len2 = dx * dx + dy * dy;
  double u = len2 > 0.0 ? ((px - ax) * dx + (py - ay) * dy) / len2 : 0.0;
  u = std::clamp(u, 0.0, 1.0);
  const double cx = ax + u * dx;
  const double cy = ay + u * dy;
  return std::hypot(px - cx, py - cy);
}

}  // namespace detail

inline Image apply_rain(const Image& img, double t, std::uint64_t seed,
                        const RainParams& p = {}) {
  if (t < 0.0 || t > 1.0) throw ContractError("rain intensity must lie in [0,1]");
  if (t == 0.0) return img;
  const int w = img.width;
  const int h = img.height;
  std::vector<double> add(img.pixel_count(), 0.0);
  const long n = rain_streak_count(t, w, h, p);
  const std::uint64_t streak_seed = derive_seed(seed, "rain-streak");
  for (long i = 0; i < n; ++i) {
    Rng rng(derive_seed(streak_seed, std::uint64_t(i)));
    const double cx = rng.uniform(0.0, double(w));
    const double cy = rng.uniform(0.0, double(h));
    const double ang =
        rng.uniform(p.angle_min_deg, p.angle_max_deg) * (M_PI / 180.0);
    const double len = p.length_min + p.length_span * t * rng.next_double();
    const double hx = 0.5 * len * std::cos(ang);
    const double hy = 0.5 * len * std::sin(ang);
    const double ax = cx - hx, ay = cy - hy;
    const double bx = cx + hx, by = cy + hy;
    const int x0 = std::max(0, int(std::floor(std::min(ax, bx) - 2.0)));
    const int x1 = std::min(w - 1, int(std::ceil(std::max(ax, bx) + 2.0)));
    const int y0 = std::max(0, int(std::floor(std::min(ay, by) - 2.0)));
    const int y1 = std::min(h - 1, int(std::ceil(std::max(ay, by) + 2.0)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double d = detail::point_segment_dist(x + 0.5, y + 0.5, ax, ay, bx, by);
        const double cov = 1.0 - d;  // 1-px linear falloff
        if (cov > 0.0) add[std::size_t(y) * w + x] += p.brightness * cov;
      }
    }
  }
  Image out = img;
  const double beta = p.desat_blend * t;
  for (std::size_t px = 0; px < img.pixel_count(); ++px) {
    double r = std::min(1.0, double(img.data[px * 3 + 0]) + add[px]);
    double g = std::min(1.0, double(img.data[px * 3 + 1]) + add[px]);
    double b = std::min(1.0, double(img.data[px * 3 + 2]) + add[px]);
    const double mean = (r + g + b) / 3.0;
    out.data[px * 3 + 0] = float(r + beta * (mean - r));
    out.data[px * 3 + 1] = float(g + beta * (mean - g));
    out.data[px * 3 + 2] = float(b + beta * (mean - b));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Snow: m = round(density * t * area/area_ref) Gaussian flakes composited
// toward white, then a uniform white veil of strength veil * t. Every step
// moves pixels toward 1, so outputs are monotone nondecreasing in the input.

inline long snow_flake_count(double t, int width, int height,
                             const SnowParams& p = {}) {
  return std::llround(p.density * t * (double(width) * height / p.area_ref));
}

inline Image apply_snow(const Image& img, double t, std::uint64_t seed,
                        const SnowParams& p = {}) {
  if (t < 0.0 || t > 1.0) throw ContractError("snow intensity must lie in [0,1]");
  if (t == 0.0) return img;
  const int w = img.width;
  const int h = img.height;
  // Accumulate flake opacity multiplicatively: 1 - a_total = prod(1 - a_i).
  std::vector<double> keep(img.pixel_count(), 1.0);
  const long m = snow_flake_count(t, w, h, p);
  const std::uint64_t flake_seed = derive_seed(seed, "snow-flake");
  for (long i = 0; i < m; ++i) {
    Rng rng(derive_seed(flake_seed, std::uint64_t(i)));
    const double cx = rng.uniform(0.0, double(w));
    const double cy = rng.uniform(0.0, double(h));
    const double radius = rng.uniform(p.radius_min, p.radius_max);
    const double sigma = 0.5 * radius;
    const int win = int(std::ceil(3.0 * sigma));
    const int x0 = std::max(0, int(std::floor(cx)) - win);
    const int x1 = std::min(w - 1, int(std::floor(cx)) + win);
    const int y0 = std::max(0, int(std::floor(cy)) - win);
    const int y1 = std::min(h - 1, int(std::floor(cy)) + win);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double dx = x + 0.5 - cx;
        const double dy = y + 0.5 - cy;
        const double a =
            p.peak_alpha * std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
        keep[std::size_t(y) * w + x] *= 1.0 - a;
      }
    }
  }
  Image out = img;
  const double veil = p.veil * t;
  for (std::size_t px = 0; px < img.pixel_count(); ++px) {
    for (int c = 0; c < 3; ++c) {
      const double v = img.data[px * 3 + c];
      const double flaked = 1.0 - keep[px] * (1.0 - v);
      out.data[px * 3 + c] = float((1.0 - veil) * flaked + veil);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

inline Image apply_weather(const Image& img, const WeatherSpec& spec,
                           const WeatherParams& params = {}) {
  if (img.space != ColorSpace::RGB)
    throw ContractError("apply_weather: image must be RGB");
  validate(spec);
  switch (spec.condition) {
    case Condition::None: return img;
    case Condition::Fog: return apply_fog(img, spec.intensity, spec.seed, params.fog);
    case Condition::Rain: return apply_rain(img, spec.intensity, spec.seed, params.rain);
    default: return apply_snow(img, spec.intensity, spec.seed, params.snow);
  }
}

}  // namespace wunet
