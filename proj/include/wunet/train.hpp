#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "wunet/adam.hpp"
#include "wunet/checkpoint.hpp"
#include "wunet/manifest.hpp"
#include "wunet/model.hpp"

namespace wunet {

struct TrainConfig {
  int epochs = 200;
  int batch_size = 24;  // 160 is the usual choice for crop-mode datasets
  double lr = 0.01;
  std::uint64_t seed = 0;
  std::string checkpoint_dir;
};

// A sample pair already converted to the model's color space and flattened to
// planar CHW buffers.
struct SamplePair {
  std::vector<float> input;
  std::vector<float> target;
};

// Loads (augmented image, clear target) pairs for a manifest. Both sides are
// converted to the model color space here so the training loop never touches
// color again.
inline std::vector<SamplePair> load_sample_pairs(
    const std::vector<SampleRecord>& records,
    const std::filesystem::path& base_dir, const WUNetConfig& cfg) {
  std::vector<SamplePair> pairs;
  pairs.reserve(records.size());
  for (const auto& rec : records) {
    Image input, target;
    try {
      input = read_ppm(resolve_path(base_dir, rec.image_path));
      target = read_ppm(resolve_path(base_dir, rec.clear_ref));
    } catch (const Error& e) {
      throw DataError("sample '" + rec.id + "': " + e.what());
    }
    if (input.width != cfg.net_width() || input.height != cfg.net_height() ||
        target.width != input.width || target.height != input.height)
      throw DataError("sample '" + rec.id + "': image size " +
                      std::to_string(input.width) + "x" +
                      std::to_string(input.height) +
                      " does not match network input " +
                      std::to_string(cfg.net_width()) + "x" +
                      std::to_string(cfg.net_height()));
    if (cfg.color_space == ColorSpace::HSV) {
      input = rgb_to_hsv(input);
      target = rgb_to_hsv(target);
    }
    SamplePair pair;
    pair.input.resize(input.data.size());
    pair.target.resize(target.data.size());
    copy_image_into(input, pair.input.data());
    copy_image_into(target, pair.target.data());
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

struct EpochStats {
  int epoch = 0;
  double train_mse = 0.0;
  double test_mse = 0.0;
};

struct TrainResult {
  double best_test_mse = std::numeric_limits<double>::infinity();
  int best_epoch = 0;
  std::string best_path;
  std::string last_path;
  std::string log_path;
  std::vector<EpochStats> log;
};

namespace detail {

inline Tensor<float> gather_batch(const std::vector<SamplePair>& pairs,
                                  const std::vector<std::size_t>& order,
                                  std::size_t begin, std::size_t end,
                                  bool target, int h, int w) {
  Tensor<float> t = Tensor<float>::zeros({int(end - begin), 3, h, w});
  const std::size_t stride = std::size_t(3) * h * w;
  for (std::size_t i = begin; i < end; ++i) {
    const auto& src = target ? pairs[order[i]].target : pairs[order[i]].input;
    std::copy(src.begin(), src.end(), t.data().begin() + (i - begin) * stride);
  }
  return t;
}

inline double mean_mse_over(const Model<float>& model,
                            const std::vector<SamplePair>& pairs,
                            int batch_size) {
  NoGradGuard ng;
  const int h = model.cfg.net_height(), w = model.cfg.net_width();
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), std::size_t(0));
  double acc = 0.0;
  for (std::size_t begin = 0; begin < pairs.size();
       begin += std::size_t(batch_size)) {
    const std::size_t end =
        std::min(pairs.size(), begin + std::size_t(batch_size));
    const auto x = gather_batch(pairs, order, begin, end, false, h, w);
    const auto y = gather_batch(pairs, order, begin, end, true, h, w);
    const auto pred = forward(model, x);
    acc += double(mse_loss(pred, y).item()) * double(end - begin);
  }
  return acc / double(pairs.size());
}

}  // namespace detail

// Minibatch MSE training with Adam. Each epoch applies a seeded shuffle,
// evaluates mean MSE on the test set, appends a CSV log row, rewrites
// last.wun, and refreshes best.wun whenever the test MSE improves. Returns
// the best checkpoint's stats and paths. Single-threaded by design: two runs
// with the same seed produce identical loss curves and checkpoint bytes.
inline TrainResult train(Model<float>& model,
                         const std::vector<SamplePair>& train_pairs,
                         const std::vector<SamplePair>& test_pairs,
                         const TrainConfig& tc) {
  if (train_pairs.empty()) throw DataError("train: empty training set");
  if (test_pairs.empty()) throw DataError("train: empty test set");
  if (tc.epochs < 1 || tc.batch_size < 1 || tc.lr <= 0.0)
    throw ConfigError("train: epochs and batch_size must be >= 1 and lr > 0");
  namespace fs = std::filesystem;
  fs::create_directories(tc.checkpoint_dir);

  const int h = model.cfg.net_height(), w = model.cfg.net_width();
  auto params = model.parameters();
  AdamState<float> opt;
  opt.lr = tc.lr;

  TrainResult result;
  result.best_path = (fs::path(tc.checkpoint_dir) / "best.wun").string();
  result.last_path = (fs::path(tc.checkpoint_dir) / "last.wun").string();
  result.log_path = (fs::path(tc.checkpoint_dir) / "training_log.csv").string();

  std::ofstream log(result.log_path, std::ios::trunc);
  if (!log) throw DataError("cannot open " + result.log_path + " for writing");
  log << "epoch,train_mse,test_mse\n";

  std::vector<std::size_t> order(train_pairs.size());
  std::iota(order.begin(), order.end(), std::size_t(0));

  for (int epoch = 1; epoch <= tc.epochs; ++epoch) {
    // Fisher-Yates with a per-epoch derived stream.
    Rng shuffle_rng(derive_seed(tc.seed, "shuffle", std::uint64_t(epoch)));
    for (std::size_t i = order.size(); i > 1; --i) {
      const auto j = std::size_t(shuffle_rng.uniform_int(0, std::int64_t(i) - 1));
      std::swap(order[i - 1], order[j]);
    }

    double train_acc = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t begin = 0; begin < order.size();
         begin += std::size_t(tc.batch_size), ++batch_index) {
      const std::size_t end =
          std::min(order.size(), begin + std::size_t(tc.batch_size));
      const auto x = detail::gather_batch(train_pairs, order, begin, end, false, h, w);
      const auto y = detail::gather_batch(train_pairs, order, begin, end, true, h, w);
      const auto pred = forward(model, x);
      const auto loss = mse_loss(pred, y);
      const double lv = double(loss.item());
      if (!std::isfinite(lv))
        throw TrainingError("non-finite loss " + std::to_string(lv) +
                            " at epoch " + std::to_string(epoch) + ", batch " +
                            std::to_string(batch_index));
      train_acc += lv * double(end - begin);
      backward(loss);
      adam_step(params, opt);
    }
    const double train_mse = train_acc / double(train_pairs.size());
    const double test_mse =
        detail::mean_mse_over(model, test_pairs, tc.batch_size);

    char row[96];
    std::snprintf(row, sizeof(row), "%d,%.9g,%.9g\n", epoch, train_mse, test_mse);
    log << row;
    log.flush();

    save_checkpoint(model, test_mse, result.last_path);
    if (test_mse < result.best_test_mse) {
      result.best_test_mse = test_mse;
      result.best_epoch = epoch;
      save_checkpoint(model, test_mse, result.best_path);
    }
    result.log.push_back({epoch, train_mse, test_mse});
  }
  return result;
}

}  // namespace wunet
