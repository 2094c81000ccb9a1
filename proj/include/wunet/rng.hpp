#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace wunet {

// Deterministic counter-based randomness. Value i of a stream with seed s is
// mix64(s + (i+1)*kGolden), the SplitMix64 sequence. Sub-streams are derived
// by hashing identifiers into a fresh seed instead of sharing counters, so
// parallel consumers of disjoint ids never perturb each other and every
// output is a pure function of (seed, ids, counter). The scheme is small
// enough to port bit-exactly to any language with 64-bit integers.

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

inline constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return mix64(seed ^ mix64(tag + kGolden));
}

inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view id) {
  return derive_seed(seed, fnv1a64(id));
}

inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                           std::uint64_t b) {
  return derive_seed(derive_seed(seed, a), b);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view a,
                                 std::uint64_t b) {
  return derive_seed(derive_seed(seed, a), b);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view a,
                                 std::string_view b) {
  return derive_seed(derive_seed(seed, a), b);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64() { return mix64(seed_ + (++counter_) * kGolden); }

  // Uniform in [0,1) with 53-bit resolution.
  double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Uniform integer in [lo, hi], bounds inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + std::int64_t(next_u64() % std::uint64_t(hi - lo + 1));
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

// ---------------------------------------------------------------------------
// Seeded value noise. Lattice values in [0,1) are hashed from
// (seed, octave, cell coordinates) and interpolated with smoothstep weights;
// octave o halves the cell size and the amplitude of octave 0. The weighted
// sum is normalized back into [0,1).

inline double lattice_value(std::uint64_t seed, int octave, std::int64_t ix,
                            std::int64_t iy) {
  std::uint64_t h = derive_seed(seed, std::uint64_t(octave));
  h = derive_seed(h, std::uint64_t(ix), std::uint64_t(iy));
  return double(h >> 11) * 0x1.0p-53;
}

inline double smoothstep01(double u) { return u * u * (3.0 - 2.0 * u); }

inline double value_noise(double x, double y, std::uint64_t seed,
                          int octaves = 3, double base_cell = 32.0) {
  double total = 0.0;
  double norm = 0.0;
  double amp = 1.0;
  double cell = base_cell;
  for (int o = 0; o < octaves; ++o) {
    const double gx = x / cell;
    const double gy = y / cell;
    const auto ix = std::int64_t(std::floor(gx));
    const auto iy = std::int64_t(std::floor(gy));
    const double sx = smoothstep01(gx - double(ix));
    const double sy = smoothstep01(gy - double(iy));
    const double v00 = lattice_value(seed, o, ix, iy);
    const double v10 = lattice_value(seed, o, ix + 1, iy);
    const double v01 = lattice_value(seed, o, ix, iy + 1);
    const double v11 = lattice_value(seed, o, ix + 1, iy + 1);
    const double top = v00 + (v10 - v00) * sx;
    const double bot = v01 + (v11 - v01) * sx;
    total += amp * (top + (bot - top) * sy);
    norm += amp;
    amp *= 0.5;
    cell *= 0.5;
  }
  return total / norm;
}

}  // namespace wunet
