#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "wunet/image.hpp"
#include "wunet/ops.hpp"
#include "wunet/rng.hpp"
#include "wunet/tensor.hpp"

namespace wunet {

// WUNet: a UNet encoder-decoder that maps weather-degraded frames to clear
// ones. Depth counts encoder levels; channels double per level. The decoder
// upsamples with nearest-neighbor + conv (no transposed convolutions) and the
// head is a 1x1 conv + sigmoid, so outputs always land in (0,1).

struct WUNetConfig {
  int depth = 3;
  int base_channels = 16;
  ColorSpace color_space = ColorSpace::RGB;
  bool crop_mode = false;
  CropGrid crop_grid{};
  int input_width = 640;
  int input_height = 200;

  // Size of the tensor the network actually sees.
  int net_width() const { return crop_mode ? crop_grid.crop_width : input_width; }
  int net_height() const { return crop_mode ? crop_grid.crop_height : input_height; }

  void validate() const {
    if (depth < 1 || depth > 10) throw ConfigError("depth must be in [1,10]");
    if (base_channels < 1) throw ConfigError("base_channels must be >= 1");
    if (input_width < 1 || input_height < 1)
      throw ConfigError("input size must be positive");
    if (crop_mode) {
      if (crop_grid.cols * crop_grid.crop_width != input_width ||
          crop_grid.rows * crop_grid.crop_height != input_height)
        throw ConfigError("crop grid does not tile the input size");
    }
    const int div = 1 << depth;
    if (net_width() % div != 0 || net_height() % div != 0)
      throw ConfigError("network input " + std::to_string(net_width()) + "x" +
                        std::to_string(net_height()) + " is not divisible by 2^depth (" +
                        std::to_string(div) + ")");
  }
};

template <typename T>
struct ConvParams {
  Tensor<T> w;
  Tensor<T> b;
};

template <typename T>
struct Model {
  WUNetConfig cfg;
  std::vector<ConvParams<T>> enc;   // two convs per level: enc[2i], enc[2i+1]
  std::array<ConvParams<T>, 2> bottleneck;
  std::vector<ConvParams<T>> dec;   // two convs per level, indexed like enc
  ConvParams<T> head;               // 1x1

  std::vector<std::pair<std::string, Tensor<T>>> named_parameters() const {
    std::vector<std::pair<std::string, Tensor<T>>> out;
    auto push = [&out](const std::string& name, const ConvParams<T>& c) {
      out.emplace_back(name + ".w", c.w);
      out.emplace_back(name + ".b", c.b);
    };
    for (int i = 0; i < cfg.depth; ++i) {
      push("enc" + std::to_string(i) + ".c0", enc[std::size_t(2 * i)]);
      push("enc" + std::to_string(i) + ".c1", enc[std::size_t(2 * i + 1)]);
    }
    push("bottleneck.c0", bottleneck[0]);
    push("bottleneck.c1", bottleneck[1]);
    for (int i = cfg.depth - 1; i >= 0; --i) {
      push("dec" + std::to_string(i) + ".c0", dec[std::size_t(2 * i)]);
      push("dec" + std::to_string(i) + ".c1", dec[std::size_t(2 * i + 1)]);
    }
    push("head", head);
    return out;
  }

  std::vector<Tensor<T>> parameters() const {
    std::vector<Tensor<T>> out;
    for (auto& [name, t] : named_parameters()) out.push_back(t);
    return out;
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& p : parameters()) n += p.numel();
    return n;
  }
};

// Channel width of encoder level i.
inline int level_channels(const WUNetConfig& cfg, int level) {
  return cfg.base_channels << level;
}

template <typename T>
Model<T> build_model(const WUNetConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  // He-uniform weights keyed by parameter name; biases zero. Name-keyed
  // streams make initialization independent of construction order.
  auto make_conv = [&](const std::string& name, int cin, int cout, int k) {
    Tensor<T> w = Tensor<T>::zeros({cout, cin, k, k}, true);
    const double bound = std::sqrt(6.0 / (double(cin) * k * k));
    Rng rng(derive_seed(seed, name + ".w"));
    for (auto& v : w.data()) v = T(rng.uniform(-bound, bound));
    Tensor<T> b = Tensor<T>::zeros({cout}, true);
    return ConvParams<T>{w, b};
  };

  Model<T> m;
  m.cfg = cfg;
  int in_ch = 3;
  for (int i = 0; i < cfg.depth; ++i) {
    const int ch = level_channels(cfg, i);
    m.enc.push_back(make_conv("enc" + std::to_string(i) + ".c0", in_ch, ch, 3));
    m.enc.push_back(make_conv("enc" + std::to_string(i) + ".c1", ch, ch, 3));
    in_ch = ch;
  }
  const int bott_ch = level_channels(cfg, cfg.depth);
  m.bottleneck[0] = make_conv("bottleneck.c0", in_ch, bott_ch, 3);
  m.bottleneck[1] = make_conv("bottleneck.c1", bott_ch, bott_ch, 3);
  m.dec.resize(std::size_t(2 * cfg.depth));
  int above_ch = bott_ch;
  for (int i = cfg.depth - 1; i >= 0; --i) {
    const int ch = level_channels(cfg, i);
    m.dec[std::size_t(2 * i)] =
        make_conv("dec" + std::to_string(i) + ".c0", above_ch + ch, ch, 3);
    m.dec[std::size_t(2 * i + 1)] =
        make_conv("dec" + std::to_string(i) + ".c1", ch, ch, 3);
    above_ch = ch;
  }
  m.head = make_conv("head", level_channels(cfg, 0), 3, 1);
  return m;
}

// Forward pass over a [N,3,H,W] batch; H,W must match the network input size.
template <typename T>
Tensor<T> forward(const Model<T>& m, const Tensor<T>& x) {
  if (x.shape().size() != 4 || x.dim(1) != 3)
    throw ShapeError("forward: input must be [N,3,H,W]");
  if (x.dim(2) != m.cfg.net_height() || x.dim(3) != m.cfg.net_width())
    throw ShapeError("forward: input " + std::to_string(x.dim(3)) + "x" +
                     std::to_string(x.dim(2)) + " does not match network input " +
                     std::to_string(m.cfg.net_width()) + "x" +
                     std::to_string(m.cfg.net_height()));
  std::vector<Tensor<T>> skips;
  // Pixels arrive in [0,1]; the network sees them centered on zero, which
  // keeps first-layer features balanced even for bright weather inputs.
  Tensor<T> cur = scale_shift(x, T(2), T(-1));
  for (int i = 0; i < m.cfg.depth; ++i) {
    cur = relu(conv2d(cur, m.enc[std::size_t(2 * i)].w, m.enc[std::size_t(2 * i)].b));
    cur = relu(conv2d(cur, m.enc[std::size_t(2 * i + 1)].w, m.enc[std::size_t(2 * i + 1)].b));
    skips.push_back(cur);
    cur = maxpool2(cur);
  }
  cur = relu(conv2d(cur, m.bottleneck[0].w, m.bottleneck[0].b));
  cur = relu(conv2d(cur, m.bottleneck[1].w, m.bottleneck[1].b));
  for (int i = m.cfg.depth - 1; i >= 0; --i) {
    cur = upsample_nn2(cur);
    cur = concat_channels(cur, skips[std::size_t(i)]);
    cur = relu(conv2d(cur, m.dec[std::size_t(2 * i)].w, m.dec[std::size_t(2 * i)].b));
    cur = relu(conv2d(cur, m.dec[std::size_t(2 * i + 1)].w, m.dec[std::size_t(2 * i + 1)].b));
  }
  return sigmoid(conv2d(cur, m.head.w, m.head.b));
}

// ---------------------------------------------------------------------------
// Image <-> tensor conversion (planar CHW in tensors, interleaved in images).

template <typename T>
void copy_image_into(const Image& img, T* dst) {
  const std::size_t plane = img.pixel_count();
  for (int c = 0; c < 3; ++c)
    for (std::size_t p = 0; p < plane; ++p)
      dst[std::size_t(c) * plane + p] = T(img.data[p * 3 + c]);
}

template <typename T>
Tensor<T> images_to_tensor(const std::vector<Image>& imgs) {
  if (imgs.empty()) throw ShapeError("images_to_tensor: empty batch");
  const int w = imgs.front().width, h = imgs.front().height;
  Tensor<T> t = Tensor<T>::zeros({int(imgs.size()), 3, h, w});
  const std::size_t stride = std::size_t(3) * h * w;
  for (std::size_t n = 0; n < imgs.size(); ++n) {
    if (imgs[n].width != w || imgs[n].height != h)
      throw ShapeError("images_to_tensor: mixed image sizes");
    copy_image_into(imgs[n], t.data().data() + n * stride);
  }
  return t;
}

template <typename T>
Image tensor_slice_to_image(const Tensor<T>& t, int n, ColorSpace space) {
  if (t.shape().size() != 4 || t.dim(1) != 3)
    throw ShapeError("tensor_slice_to_image: tensor must be [N,3,H,W]");
  const int h = t.dim(2), w = t.dim(3);
  Image img = Image::zeros(w, h, space);
  const std::size_t plane = std::size_t(h) * w;
  const T* src = t.data().data() + std::size_t(n) * 3 * plane;
  for (int c = 0; c < 3; ++c)
    for (std::size_t p = 0; p < plane; ++p)
      img.data[p * 3 + c] = float(src[std::size_t(c) * plane + p]);
  return img;
}

// ---------------------------------------------------------------------------
// Whole-image denoising entry point. Inputs and outputs are RGB images; the
// configured color space only affects the representation the network sees.
// Crop mode splits into the configured grid, forwards all crops as one batch,
// and rejoins predictions in grid order.

template <typename T>
Image forward_image(const Model<T>& m, const Image& img) {
  if (img.space != ColorSpace::RGB)
    throw ContractError("forward_image: input image must be RGB");
  if (img.width != m.cfg.input_width || img.height != m.cfg.input_height)
    throw ShapeError("forward_image: image " + std::to_string(img.width) + "x" +
                     std::to_string(img.height) + " does not match configured input " +
                     std::to_string(m.cfg.input_width) + "x" +
                     std::to_string(m.cfg.input_height));
  NoGradGuard ng;
  const Image work =
      m.cfg.color_space == ColorSpace::HSV ? rgb_to_hsv(img) : img;
  Image result;
  if (!m.cfg.crop_mode) {
    const Tensor<T> x = images_to_tensor<T>({work});
    const Tensor<T> y = forward(m, x);
    result = tensor_slice_to_image(y, 0, m.cfg.color_space);
  } else {
    const std::vector<Image> crops = split_crops(work, m.cfg.crop_grid);
    const Tensor<T> x = images_to_tensor<T>(crops);
    const Tensor<T> y = forward(m, x);
    std::vector<Image> outs;
    outs.reserve(crops.size());
    for (std::size_t k = 0; k < crops.size(); ++k)
      outs.push_back(tensor_slice_to_image(y, int(k), m.cfg.color_space));
    result = join_crops(outs, m.cfg.crop_grid);
  }
  return m.cfg.color_space == ColorSpace::HSV ? hsv_to_rgb(result) : result;
}

}  // namespace wunet
