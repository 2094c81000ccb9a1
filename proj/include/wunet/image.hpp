#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "wunet/error.hpp"

namespace wunet {

enum class ColorSpace { RGB, HSV };

inline const char* to_string(ColorSpace cs) {
  return cs == ColorSpace::RGB ? "rgb" : "hsv";
}

// Interleaved row-major raster with three channels and values in [0,1].
// HSV images store hue normalized to [0,1) (degrees / 360) so both color
// spaces satisfy the same value range.
struct Image {
  int width = 0;
  int height = 0;
  static constexpr int channels = 3;
  ColorSpace space = ColorSpace::RGB;
  std::vector<float> data;  // width * height * 3 floats

  static Image zeros(int w, int h, ColorSpace cs = ColorSpace::RGB) {
    Image img;
    img.width = w;
    img.height = h;
    img.space = cs;
    img.data.assign(std::size_t(w) * h * channels, 0.0f);
    return img;
  }

  std::size_t pixel_count() const { return std::size_t(width) * height; }

  float& at(int x, int y, int c) {
    return data[(std::size_t(y) * width + x) * channels + c];
  }
  float at(int x, int y, int c) const {
    return data[(std::size_t(y) * width + x) * channels + c];
  }
};

// Round-half-up quantization used for all 8-bit emission.
inline unsigned char quantize_byte(float v) {
  double q = std::floor(double(v) * 255.0 + 0.5);
  if (q < 0.0) q = 0.0;
  if (q > 255.0) q = 255.0;
  return static_cast<unsigned char>(q);
}

// ---------------------------------------------------------------------------
// PPM (P6) reader/writer. The only interchange format; emission is bit-exact
// across platforms: header "P6\n<w> <h>\n255\n" followed by raw RGB bytes.

namespace detail {

inline std::string ppm_next_token(std::istream& in, const std::string& path) {
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (!std::isspace(c)) break;
  }
  if (c == EOF) throw FormatError(path + ": truncated PPM header");
  std::string tok;
  tok.push_back(char(c));
  while ((c = in.get()) != EOF && !std::isspace(c)) tok.push_back(char(c));
  return tok;
}

inline int ppm_parse_int(const std::string& tok, const std::string& path,
                         const char* what) {
  for (char c : tok) {
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw FormatError(path + ": invalid " + what + " '" + tok + "'");
  }
  if (tok.empty() || tok.size() > 9)
    throw FormatError(path + ": invalid " + what + " '" + tok + "'");
  return std::stoi(tok);
}

}  // namespace detail

inline Image read_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  const std::string magic = detail::ppm_next_token(in, path);
  if (magic != "P6")
    throw FormatError(path + ": expected magic P6, got '" + magic + "'");
  const int w = detail::ppm_parse_int(detail::ppm_next_token(in, path), path, "width");
  const int h = detail::ppm_parse_int(detail::ppm_next_token(in, path), path, "height");
  const int maxval =
      detail::ppm_parse_int(detail::ppm_next_token(in, path), path, "maxval");
  if (w < 1 || h < 1) throw FormatError(path + ": non-positive dimensions");
  if (maxval != 255)
    throw FormatError(path + ": unsupported maxval " + std::to_string(maxval));
  std::vector<unsigned char> bytes(std::size_t(w) * h * 3);
  in.read(reinterpret_cast<char*>(bytes.data()), std::streamsize(bytes.size()));
  if (std::size_t(in.gcount()) != bytes.size())
    throw FormatError(path + ": truncated pixel payload");
  Image img = Image::zeros(w, h, ColorSpace::RGB);
  for (std::size_t i = 0; i < bytes.size(); ++i)
    img.data[i] = float(bytes[i]) / 255.0f;
  return img;
}

inline void write_ppm(const Image& img, const std::string& path) {
  if (img.space != ColorSpace::RGB)
    throw ContractError("write_ppm: image must be RGB; convert HSV first");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path + " for writing");
  out << "P6\n" << img.width << " " << img.height << "\n255\n";
  std::vector<unsigned char> bytes(img.data.size());
  for (std::size_t i = 0; i < bytes.size(); ++i)
    bytes[i] = quantize_byte(img.data[i]);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            std::streamsize(bytes.size()));
  if (!out) throw DataError("write failed: " + path);
}

// ---------------------------------------------------------------------------
// RGB <-> HSV (hexcone). Hue is stored as degrees/360 in [0,1); saturation is
// (max-min)/max with 0 for black; value is max. Math runs in double and is
// rounded once into float storage.

inline Image rgb_to_hsv(const Image& img) {
  if (img.space != ColorSpace::RGB)
    throw ContractError("rgb_to_hsv: image is not RGB");
  Image out = img;
  out.space = ColorSpace::HSV;
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    const double r = img.data[p * 3 + 0];
    const double g = img.data[p * 3 + 1];
    const double b = img.data[p * 3 + 2];
    const double mx = std::max(r, std::max(g, b));
    const double mn = std::min(r, std::min(g, b));
    const double d = mx - mn;
    double h = 0.0;
    if (d > 0.0) {
      if (mx == r)
        h = (g - b) / d;
      else if (mx == g)
        h = (b - r) / d + 2.0;
      else
        h = (r - g) / d + 4.0;
      h /= 6.0;
      if (h < 0.0) h += 1.0;
      if (h >= 1.0) h -= 1.0;
    }
    const double s = mx > 0.0 ? d / mx : 0.0;
    out.data[p * 3 + 0] = float(h);
    out.data[p * 3 + 1] = float(s);
    out.data[p * 3 + 2] = float(mx);
  }
  return out;
}

inline Image hsv_to_rgb(const Image& img) {
  if (img.space != ColorSpace::HSV)
    throw ContractError("hsv_to_rgb: image is not HSV");
  Image out = img;
  out.space = ColorSpace::RGB;
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    const double h = img.data[p * 3 + 0];
    const double s = img.data[p * 3 + 1];
    const double v = img.data[p * 3 + 2];
    double h6 = h * 6.0;
    if (h6 >= 6.0) h6 -= 6.0;
    const int sector = std::min(5, int(h6));
    const double f = h6 - double(sector);
    const double pp = v * (1.0 - s);
    const double q = v * (1.0 - s * f);
    const double t = v * (1.0 - s * (1.0 - f));
    double r, g, b;
    switch (sector) {
      case 0: r = v; g = t; b = pp; break;
      case 1: r = q; g = v; b = pp; break;
      case 2: r = pp; g = v; b = t; break;
      case 3: r = pp; g = q; b = v; break;
      case 4: r = t; g = pp; b = v; break;
      default: r = v; g = pp; b = q; break;
    }
    out.data[p * 3 + 0] = float(r);
    out.data[p * 3 + 1] = float(g);
    out.data[p * 3 + 2] = float(b);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Crop tiling. A CropGrid must divide the source exactly; crops are produced
// and consumed in row-major grid order (left to right, top to bottom).

struct CropGrid {
  int cols = 1;
  int rows = 1;
  int crop_width = 0;
  int crop_height = 0;

  int count() const { return cols * rows; }
};

inline CropGrid make_crop_grid(int cols, int rows, int image_width,
                               int image_height) {
  if (cols < 1 || rows < 1)
    throw DimensionError("crop grid must have at least one column and row");
  if (image_width % cols != 0 || image_height % rows != 0)
    throw DimensionError("grid " + std::to_string(cols) + "x" +
                         std::to_string(rows) + " does not divide image " +
                         std::to_string(image_width) + "x" +
                         std::to_string(image_height));
  return CropGrid{cols, rows, image_width / cols, image_height / rows};
}

inline std::vector<Image> split_crops(const Image& img, const CropGrid& grid) {
  if (grid.cols * grid.crop_width != img.width ||
      grid.rows * grid.crop_height != img.height)
    throw DimensionError("crop grid does not tile image exactly");
  std::vector<Image> crops;
  crops.reserve(std::size_t(grid.count()));
  for (int gy = 0; gy < grid.rows; ++gy) {
    for (int gx = 0; gx < grid.cols; ++gx) {
      Image crop = Image::zeros(grid.crop_width, grid.crop_height, img.space);
      for (int y = 0; y < grid.crop_height; ++y) {
        const float* src =
            &img.data[((std::size_t(gy) * grid.crop_height + y) * img.width +
                       std::size_t(gx) * grid.crop_width) *
                      3];
        std::copy(src, src + std::size_t(grid.crop_width) * 3,
                  &crop.data[std::size_t(y) * grid.crop_width * 3]);
      }
      crops.push_back(std::move(crop));
    }
  }
  return crops;
}

inline Image join_crops(const std::vector<Image>& crops, const CropGrid& grid) {
  if (int(crops.size()) != grid.count())
    throw DimensionError("join_crops: expected " + std::to_string(grid.count()) +
                         " crops, got " + std::to_string(crops.size()));
  for (const Image& c : crops) {
    if (c.width != grid.crop_width || c.height != grid.crop_height)
      throw DimensionError("join_crops: crop dimensions do not match grid");
    if (c.space != crops.front().space)
      throw ContractError("join_crops: mixed color spaces");
  }
  Image out = Image::zeros(grid.cols * grid.crop_width,
                           grid.rows * grid.crop_height, crops.front().space);
  for (int gy = 0; gy < grid.rows; ++gy) {
    for (int gx = 0; gx < grid.cols; ++gx) {
      const Image& crop = crops[std::size_t(gy) * grid.cols + gx];
      for (int y = 0; y < grid.crop_height; ++y) {
        const float* src = &crop.data[std::size_t(y) * grid.crop_width * 3];
        std::copy(src, src + std::size_t(grid.crop_width) * 3,
                  &out.data[((std::size_t(gy) * grid.crop_height + y) * out.width +
                             std::size_t(gx) * grid.crop_width) *
                            3]);
      }
    }
  }
  return out;
}

inline double image_mse(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height)
    throw DimensionError("image_mse: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = double(a.data[i]) - double(b.data[i]);
    acc += d * d;
  }
  return a.data.empty() ? 0.0 : acc / double(a.data.size());
}

inline double image_mean(const Image& img) {
  double acc = 0.0;
  for (float v : img.data) acc += v;
  return img.data.empty() ? 0.0 : acc / double(img.data.size());
}

}  // namespace wunet
