#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "wunet/model.hpp"

namespace wunet {

// Checkpoint container: magic "WUN1", format version, embedded WUNetConfig,
// test-set MSE at save time, then named float32 parameter tensors. All
// multi-byte fields are little-endian, so files are identical across
// platforms and parameters round-trip bitwise.

inline constexpr char kCheckpointMagic[4] = {'W', 'U', 'N', '1'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace detail {

inline void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xFF),
                        static_cast<unsigned char>((v >> 8) & 0xFF),
                        static_cast<unsigned char>((v >> 16) & 0xFF),
                        static_cast<unsigned char>((v >> 24) & 0xFF)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

inline void write_u64(std::ostream& out, std::uint64_t v) {
  write_u32(out, std::uint32_t(v & 0xFFFFFFFFull));
  write_u32(out, std::uint32_t(v >> 32));
}

inline void write_f32(std::ostream& out, float v) {
  write_u32(out, std::bit_cast<std::uint32_t>(v));
}

inline void write_f64(std::ostream& out, double v) {
  write_u64(out, std::bit_cast<std::uint64_t>(v));
}

inline std::uint32_t read_u32(std::istream& in, const std::string& path) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (in.gcount() != 4) throw FormatError(path + ": truncated checkpoint");
  return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) |
         (std::uint32_t(b[2]) << 16) | (std::uint32_t(b[3]) << 24);
}

inline std::uint64_t read_u64(std::istream& in, const std::string& path) {
  const std::uint64_t lo = read_u32(in, path);
  const std::uint64_t hi = read_u32(in, path);
  return lo | (hi << 32);
}

inline float read_f32(std::istream& in, const std::string& path) {
  return std::bit_cast<float>(read_u32(in, path));
}

inline double read_f64(std::istream& in, const std::string& path) {
  return std::bit_cast<double>(read_u64(in, path));
}

}  // namespace detail

inline void save_checkpoint(const Model<float>& model, double test_mse,
                            const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path + " for writing");
  out.write(kCheckpointMagic, 4);
  detail::write_u32(out, kCheckpointVersion);
  const WUNetConfig& c = model.cfg;
  detail::write_u32(out, std::uint32_t(c.depth));
  detail::write_u32(out, std::uint32_t(c.base_channels));
  detail::write_u32(out, c.color_space == ColorSpace::HSV ? 1 : 0);
  detail::write_u32(out, c.crop_mode ? 1 : 0);
  detail::write_u32(out, std::uint32_t(c.crop_grid.cols));
  detail::write_u32(out, std::uint32_t(c.crop_grid.rows));
  detail::write_u32(out, std::uint32_t(c.crop_grid.crop_width));
  detail::write_u32(out, std::uint32_t(c.crop_grid.crop_height));
  detail::write_u32(out, std::uint32_t(c.input_width));
  detail::write_u32(out, std::uint32_t(c.input_height));
  detail::write_f64(out, test_mse);
  const auto named = model.named_parameters();
  detail::write_u32(out, std::uint32_t(named.size()));
  for (const auto& [name, t] : named) {
    detail::write_u32(out, std::uint32_t(name.size()));
    out.write(name.data(), std::streamsize(name.size()));
    detail::write_u32(out, std::uint32_t(t.shape().size()));
    for (int d : t.shape()) detail::write_u32(out, std::uint32_t(d));
    for (float v : t.data()) detail::write_f32(out, v);
  }
  if (!out) throw DataError("write failed: " + path);
}

struct LoadedCheckpoint {
  Model<float> model;
  double test_mse = 0.0;
};

inline LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, kCheckpointMagic, 4) != 0)
    throw FormatError(path + ": bad checkpoint magic");
  const std::uint32_t version = detail::read_u32(in, path);
  if (version != kCheckpointVersion)
    throw FormatError(path + ": unsupported checkpoint version " +
                      std::to_string(version));
  WUNetConfig c;
  c.depth = int(detail::read_u32(in, path));
  c.base_channels = int(detail::read_u32(in, path));
  c.color_space = detail::read_u32(in, path) ? ColorSpace::HSV : ColorSpace::RGB;
  c.crop_mode = detail::read_u32(in, path) != 0;
  c.crop_grid.cols = int(detail::read_u32(in, path));
  c.crop_grid.rows = int(detail::read_u32(in, path));
  c.crop_grid.crop_width = int(detail::read_u32(in, path));
  c.crop_grid.crop_height = int(detail::read_u32(in, path));
  c.input_width = int(detail::read_u32(in, path));
  c.input_height = int(detail::read_u32(in, path));
  const double test_mse = detail::read_f64(in, path);

  Model<float> model = build_model<float>(c, 0);
  std::map<std::string, Tensor<float>> by_name;
  for (auto& [name, t] : model.named_parameters()) by_name.emplace(name, t);

  const std::uint32_t count = detail::read_u32(in, path);
  if (count != by_name.size())
    throw FormatError(path + ": parameter count mismatch");
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t name_len = detail::read_u32(in, path);
    if (name_len > 4096) throw FormatError(path + ": corrupt parameter name");
    std::string name(name_len, '\0');
    in.read(name.data(), std::streamsize(name_len));
    if (std::size_t(in.gcount()) != name_len)
      throw FormatError(path + ": truncated checkpoint");
    auto it = by_name.find(name);
    if (it == by_name.end())
      throw FormatError(path + ": unknown parameter '" + name + "'");
    const std::uint32_t ndim = detail::read_u32(in, path);
    std::vector<int> dims(ndim);
    for (auto& d : dims) d = int(detail::read_u32(in, path));
    if (dims != it->second.shape())
      throw FormatError(path + ": shape mismatch for parameter '" + name + "'");
    for (auto& v : it->second.data()) v = detail::read_f32(in, path);
  }
  return LoadedCheckpoint{std::move(model), test_mse};
}

}  // namespace wunet
