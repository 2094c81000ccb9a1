// Acceptance suite: runs every pipeline-level criterion end to end and
// prints one PASS/FAIL line per criterion. Exits nonzero if any fail.

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "support/ap_oracle.hpp"
#include "support/gradcheck.hpp"
#include "support/test_util.hpp"
#include "wunet/wunet.hpp"

using namespace wunet;
namespace fs = std::filesystem;

namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void expect(bool cond, const std::string& msg) {
  if (!cond) throw Failure(msg);
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(4);
  ss << v;
  return ss.str();
}

// ---------------------------------------------------------------------------
// 1. Dataset arithmetic on synthetic manifests of the published cardinalities.

std::string criterion_dataset_arithmetic() {
  auto make_clear = [](int n, Split split) {
    std::vector<SampleRecord> records;
    records.resize(std::size_t(n));
    for (int i = 0; i < n; ++i) {
      auto& r = records[std::size_t(i)];
      r.id = "k" + std::to_string(i);
      r.image_path = "images/" + r.id + ".ppm";
      r.clear_ref = r.image_path;
      r.labels_path = "labels/" + r.id + ".txt";
      r.split = split;
    }
    return records;
  };
  const auto train = extend_records(make_clear(6699, Split::Train), 1);
  const auto test = extend_records(make_clear(782, Split::Test), 2);
  expect(train.size() == 26796, "train extension: expected 26796, got " +
                                    std::to_string(train.size()));
  expect(test.size() == 3128, "test extension: expected 3128, got " +
                                  std::to_string(test.size()));
  const CropGrid grid{4, 2, 160, 100};
  const auto train_crops = cropify_records(train, grid);
  const auto test_crops = cropify_records(test, grid);
  expect(train_crops.size() == 214368, "train crops: expected 214368, got " +
                                           std::to_string(train_crops.size()));
  expect(test_crops.size() == 25024, "test crops: expected 25024, got " +
                                         std::to_string(test_crops.size()));
  return "6699->26796, 782->3128; x8 crops 214368/25024";
}

// ---------------------------------------------------------------------------
// 2. Finite-difference gradient checks for every operator, 5 seeds each.

std::string criterion_gradients() {
  double worst = 0.0;
  std::string worst_op;
  auto track = [&](const std::string& op, double err) {
    if (err > worst) {
      worst = err;
      worst_op = op;
    }
    expect(err < 1e-4, op + ": rel error " + fmt(err));
  };

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    {
      auto x = Tensor<double>::from_data({1, 2, 4, 4},
                                         testutil::random_values(32, seed), true);
      auto w = Tensor<double>::from_data({3, 2, 3, 3},
                                         testutil::random_values(54, seed + 9), true);
      auto b = Tensor<double>::from_data({3}, testutil::random_values(3, seed + 17), true);
      auto target = Tensor<double>::from_data({1, 3, 4, 4},
                                              testutil::random_values(48, seed + 23));
      std::vector<Tensor<double>> leaves = {x, w, b};
      track("conv2d.3x3", testutil::check_gradients(leaves, [&]() {
              return mse_loss(conv2d(x, w, b), target);
            }).max_rel_error);
    }
    {
      auto x = Tensor<double>::from_data({2, 3, 2, 2},
                                         testutil::random_values(24, seed + 31), true);
      auto w = Tensor<double>::from_data({2, 3, 1, 1},
                                         testutil::random_values(6, seed + 37), true);
      auto b = Tensor<double>::from_data({2}, testutil::random_values(2, seed + 41), true);
      auto target = Tensor<double>::from_data({2, 2, 2, 2},
                                              testutil::random_values(16, seed + 43));
      std::vector<Tensor<double>> leaves = {x, w, b};
      track("conv2d.1x1", testutil::check_gradients(leaves, [&]() {
              return mse_loss(conv2d(x, w, b), target);
            }).max_rel_error);
    }
    {
      auto x = Tensor<double>::from_data(
          {1, 2, 4, 4}, testutil::pool_safe_values(1, 2, 4, 4, seed + 47), true);
      auto target = Tensor<double>::from_data({1, 2, 2, 2},
                                              testutil::random_values(8, seed + 53));
      std::vector<Tensor<double>> leaves = {x};
      track("maxpool2", testutil::check_gradients(leaves, [&]() {
              return mse_loss(maxpool2(x), target);
            }).max_rel_error);
    }
    {
      auto x = Tensor<double>::from_data({1, 2, 3, 2},
                                         testutil::random_values(12, seed + 59), true);
      auto target = Tensor<double>::from_data({1, 2, 6, 4},
                                              testutil::random_values(48, seed + 61));
      std::vector<Tensor<double>> leaves = {x};
      track("upsample_nn2", testutil::check_gradients(leaves, [&]() {
              return mse_loss(upsample_nn2(x), target);
            }).max_rel_error);
    }
    {
      auto a = Tensor<double>::from_data({1, 2, 2, 3},
                                         testutil::random_values(12, seed + 67), true);
      auto b = Tensor<double>::from_data({1, 1, 2, 3},
                                         testutil::random_values(6, seed + 71), true);
      auto target = Tensor<double>::from_data({1, 3, 2, 3},
                                              testutil::random_values(18, seed + 73));
      std::vector<Tensor<double>> leaves = {a, b};
      track("concat_channels", testutil::check_gradients(leaves, [&]() {
              return mse_loss(concat_channels(a, b), target);
            }).max_rel_error);
    }
    {
      auto x = Tensor<double>::from_data(
          {2, 1, 2, 3}, testutil::random_values_away_from_zero(12, seed + 79), true);
      auto target = Tensor<double>::from_data({2, 1, 2, 3},
                                              testutil::random_values(12, seed + 83));
      std::vector<Tensor<double>> leaves = {x};
      track("relu", testutil::check_gradients(leaves, [&]() {
              return mse_loss(relu(x), target);
            }).max_rel_error);
      track("sigmoid", testutil::check_gradients(leaves, [&]() {
              return mse_loss(sigmoid(x), target);
            }).max_rel_error);
      track("mse_loss", testutil::check_gradients(leaves, [&]() {
              return mse_loss(x, target);
            }).max_rel_error);
      track("diamond", testutil::check_gradients(leaves, [&]() {
              return sum(add(relu(x), sigmoid(x)));
            }).max_rel_error);
    }
  }
  return "worst rel error " + fmt(worst) + " (" + worst_op + ")";
}

// ---------------------------------------------------------------------------
// 3. AP equals the brute-force cutoff-enumeration oracle on 1000 instances.

std::string criterion_ap_oracle() {
  Rng rng(20240601);
  double worst = 0.0;
  for (int instance = 0; instance < 1000; ++instance) {
    const int n_img = 1 + int(rng.uniform_int(0, 1));
    const int n_gt = int(rng.uniform_int(0, 4));
    const int n_det = int(rng.uniform_int(0, 6));
    std::vector<GtBox> gts;
    for (int g = 0; g < n_gt; ++g) {
      GtBox box;
      box.left = rng.uniform(0, 80);
      box.top = rng.uniform(0, 80);
      box.right = box.left + rng.uniform(4, 30);
      box.bottom = box.top + rng.uniform(4, 30);
      box.image_id = (n_img == 2 && rng.next_double() < 0.5) ? "b" : "a";
      box.ignore = rng.next_double() < 0.15;
      gts.push_back(box);
    }
    std::vector<Detection> dets;
    for (int d = 0; d < n_det; ++d) {
      Detection dd;
      if (!gts.empty() && rng.next_double() < 0.6) {
        const auto& base = gts[std::size_t(rng.uniform_int(0, n_gt - 1))];
        dd.left = base.left + rng.uniform(-4, 4);
        dd.top = base.top + rng.uniform(-4, 4);
        dd.right = base.right + rng.uniform(-4, 4);
        dd.bottom = base.bottom + rng.uniform(-4, 4);
        dd.image_id = base.image_id;
      } else {
        dd.left = rng.uniform(0, 80);
        dd.top = rng.uniform(0, 80);
        dd.right = dd.left + rng.uniform(4, 30);
        dd.bottom = dd.top + rng.uniform(4, 30);
        dd.image_id = (n_img == 2 && rng.next_double() < 0.5) ? "b" : "a";
      }
      if (dd.right <= dd.left) dd.right = dd.left + 1;
      if (dd.bottom <= dd.top) dd.bottom = dd.top + 1;
      dd.confidence = (d + 1) * 0.1037 + rng.uniform(0.0, 0.04);
      dets.push_back(dd);
    }
    const double fast = average_precision(dets, gts);
    const double slow = testutil::ap_bruteforce(dets, gts);
    worst = std::max(worst, std::abs(fast - slow));
    expect(std::abs(fast - slow) < 1e-9,
           "instance " + std::to_string(instance) + ": |" + fmt(fast) + " - " +
               fmt(slow) + "| >= 1e-9");
  }
  return "1000 instances, worst |diff| " + fmt(worst);
}

// ---------------------------------------------------------------------------
// 4. Tiling, HSV, and PPM invariants.

std::string criterion_imaging_invariants() {
  const int grids[][4] = {{64, 32, 2, 2}, {48, 36, 4, 3}, {160, 100, 4, 2},
                          {30, 30, 5, 3}, {64, 32, 1, 1}};
  int imgs = 0;
  for (int i = 0; i < 100; ++i) {
    const auto& g = grids[i % 5];
    const Image img = testutil::random_image(g[0], g[1], std::uint64_t(i));
    const CropGrid grid = make_crop_grid(g[2], g[3], g[0], g[1]);
    const Image back = join_crops(split_crops(img, grid), grid);
    expect(back.data == img.data, "tiling round-trip differs at image " +
                                      std::to_string(i));
    ++imgs;
  }

  const Image corpus = testutil::random_image(100, 100, 424242);
  const Image rt = hsv_to_rgb(rgb_to_hsv(corpus));
  float max_err = 0.0f;
  for (std::size_t i = 0; i < corpus.data.size(); ++i)
    max_err = std::max(max_err, std::abs(corpus.data[i] - rt.data[i]));
  expect(max_err < 1e-6f, "hsv round-trip error " + fmt(double(max_err)));

  const auto dir = testutil::temp_dir("acc_ppm");
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Image img = testutil::random_image(31, 17, seed);
    const auto p1 = dir / ("a" + std::to_string(seed) + ".ppm");
    const auto p2 = dir / ("b" + std::to_string(seed) + ".ppm");
    write_ppm(img, p1.string());
    const Image once = read_ppm(p1.string());
    for (std::size_t i = 0; i < img.data.size(); ++i) {
      const float expected = float(quantize_byte(img.data[i])) / 255.0f;
      expect(once.data[i] == expected, "ppm quantization mismatch");
    }
    write_ppm(once, p2.string());
    expect(testutil::same_bytes(p1, p2), "ppm re-emission differs");
  }
  return std::to_string(imgs) + " tiling round-trips bitwise, hsv err " +
         fmt(double(max_err)) + ", ppm exact";
}

// ---------------------------------------------------------------------------
// 5 + 6. Fog training run shared by the training-sanity and detection
// criteria.

struct FogTraining {
  Model<float> best_model{};
  double best_test_mse = 0.0;
  double identity_mse = 0.0;
  int best_epoch = 0;
  bool deterministic = false;
  std::string error;
};

constexpr int kSceneW = 128, kSceneH = 64;

GeneratedScene make_eval_scene(std::uint64_t seed) {
  SceneSpec spec;
  spec.seed = seed;
  spec.width = kSceneW;
  spec.height = kSceneH;
  spec.n_objects = 3;
  return generate_scene(spec);
}

SamplePair to_pair(const Image& input, const Image& target) {
  SamplePair pair;
  pair.input.resize(input.data.size());
  pair.target.resize(target.data.size());
  copy_image_into(input, pair.input.data());
  copy_image_into(target, pair.target.data());
  return pair;
}

FogTraining run_fog_training() {
  FogTraining out;
  const std::uint64_t seed = 77;
  const CropGrid grid = make_crop_grid(2, 2, kSceneW, kSceneH);

  // 20 scenes -> 64 training crops + 16 held-out test crops of 64x32,
  // fog-corrupted at t in [0.5, 1.0].
  std::vector<SamplePair> train_pairs, test_pairs;
  double identity_acc = 0.0;
  int identity_count = 0;
  for (int i = 0; i < 20; ++i) {
    const auto scene = make_eval_scene(derive_seed(seed, "train-scene", std::uint64_t(i)));
    const double t =
        Rng(derive_seed(seed, "train-fog-t", std::uint64_t(i))).uniform(0.5, 1.0);
    const Image foggy =
        apply_fog(scene.image, t, derive_seed(seed, "train-fog", std::uint64_t(i)));
    const auto clear_crops = split_crops(scene.image, grid);
    const auto foggy_crops = split_crops(foggy, grid);
    for (int k = 0; k < grid.count(); ++k) {
      auto pair = to_pair(foggy_crops[std::size_t(k)], clear_crops[std::size_t(k)]);
      if (i < 16) {
        train_pairs.push_back(std::move(pair));
      } else {
        identity_acc +=
            image_mse(foggy_crops[std::size_t(k)], clear_crops[std::size_t(k)]);
        ++identity_count;
        test_pairs.push_back(std::move(pair));
      }
    }
  }
  out.identity_mse = identity_acc / identity_count;

  WUNetConfig cfg;
  cfg.depth = 2;
  cfg.base_channels = 8;
  cfg.input_width = grid.crop_width;
  cfg.input_height = grid.crop_height;

  TrainConfig tc;
  tc.epochs = 100;
  tc.batch_size = 16;
  tc.lr = 0.01;
  tc.seed = seed;
  tc.checkpoint_dir = testutil::temp_dir("acc_train").string();

  auto model = build_model<float>(cfg, seed);
  const auto result = train(model, train_pairs, test_pairs, tc);
  out.best_test_mse = result.best_test_mse;
  out.best_epoch = result.best_epoch;
  out.best_model = load_checkpoint(result.best_path).model;

  // Determinism evidence: two short reruns produce identical loss curves.
  TrainConfig short_tc = tc;
  short_tc.epochs = 3;
  short_tc.checkpoint_dir = testutil::temp_dir("acc_train_a").string();
  auto model_a = build_model<float>(cfg, seed);
  const auto run_a = train(model_a, train_pairs, test_pairs, short_tc);
  short_tc.checkpoint_dir = testutil::temp_dir("acc_train_b").string();
  auto model_b = build_model<float>(cfg, seed);
  const auto run_b = train(model_b, train_pairs, test_pairs, short_tc);
  out.deterministic = run_a.log.size() == run_b.log.size();
  for (std::size_t i = 0; out.deterministic && i < run_a.log.size(); ++i)
    out.deterministic = run_a.log[i].train_mse == run_b.log[i].train_mse &&
                        run_a.log[i].test_mse == run_b.log[i].test_mse;
  return out;
}

std::string criterion_training_sanity(const FogTraining& ft) {
  expect(ft.error.empty(), ft.error);
  expect(ft.deterministic, "seeded reruns diverged");
  expect(ft.best_test_mse <= 0.5 * ft.identity_mse,
         "best test mse " + fmt(ft.best_test_mse) + " vs identity " +
             fmt(ft.identity_mse));
  return "test mse " + fmt(ft.best_test_mse) + " <= 50% of identity " +
         fmt(ft.identity_mse) + " (epoch " + std::to_string(ft.best_epoch) +
         "), reruns identical";
}

std::string criterion_detection_recovery(const FogTraining& ft) {
  expect(ft.error.empty(), ft.error);
  const std::uint64_t seed = 909;
  const auto dir = testutil::temp_dir("acc_detect");
  fs::create_directories(dir / "images");
  fs::create_directories(dir / "labels");

  std::vector<SampleRecord> clear_recs, fog_recs;
  for (int i = 0; i < 32; ++i) {
    const std::string id = "ev" + std::to_string(i);
    const auto scene = make_eval_scene(derive_seed(seed, "scene", std::uint64_t(i)));
    const double t = sample_intensity(Tier::High, derive_seed(seed, "t", std::uint64_t(i)));
    const Image foggy =
        apply_fog(scene.image, t, derive_seed(seed, "fog", std::uint64_t(i)));
    write_ppm(scene.image, (dir / "images" / (id + "_clear.ppm")).string());
    write_ppm(foggy, (dir / "images" / (id + "_fog.ppm")).string());
    write_kitti_labels(scene.boxes, (dir / "labels" / (id + ".txt")).string());

    SampleRecord clear;
    clear.id = id;
    clear.image_path = "images/" + id + "_clear.ppm";
    clear.clear_ref = clear.image_path;
    clear.labels_path = "labels/" + id + ".txt";
    clear.split = Split::Val;
    clear_recs.push_back(clear);

    SampleRecord fog = clear;
    fog.image_path = "images/" + id + "_fog.ppm";
    fog.variant = Variant::Fog;
    fog.tier = Tier::High;
    fog.intensity = t;
    fog_recs.push_back(fog);
  }

  // The crop-trained model applied to full frames through the crop grid.
  Model<float> crop_model = ft.best_model;
  crop_model.cfg.crop_mode = true;
  crop_model.cfg.crop_grid = make_crop_grid(2, 2, kSceneW, kSceneH);
  crop_model.cfg.input_width = kSceneW;
  crop_model.cfg.input_height = kSceneH;
  crop_model.cfg.validate();

  EvalOptions opt;
  opt.threads = 2;
  const double map_clear =
      evaluate_set("clear", clear_recs, dir, nullptr, opt).map;
  const double map_fog = evaluate_set("fog_high", fog_recs, dir, nullptr, opt).map;
  const double map_denoised =
      evaluate_set("fog_high+wunet", fog_recs, dir, &crop_model, opt).map;

  const std::string detail = "mAP clear " + fmt(map_clear) + ", fog " +
                             fmt(map_fog) + ", denoised " + fmt(map_denoised);
  expect(map_clear >= map_denoised, detail + ": denoised exceeds clear");
  expect(map_denoised > map_fog, detail + ": no improvement over raw fog");
  expect(map_denoised - map_fog >= 0.5 * (map_clear - map_fog),
         detail + ": recovers less than half the gap");
  return detail + " (recovered " +
         fmt(100.0 * (map_denoised - map_fog) /
             std::max(1e-12, map_clear - map_fog)) +
         "% of the gap)";
}

// ---------------------------------------------------------------------------
// 7. Crop-mode forward equals scripted split -> forward -> join, bitwise.

std::string criterion_crop_equivalence() {
  WUNetConfig crop_cfg;
  crop_cfg.depth = 2;
  crop_cfg.base_channels = 4;
  crop_cfg.crop_mode = true;
  crop_cfg.crop_grid = make_crop_grid(2, 2, 64, 32);
  crop_cfg.input_width = 64;
  crop_cfg.input_height = 32;

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto crop_model = build_model<float>(crop_cfg, derive_seed(5, seed));
    WUNetConfig single_cfg = crop_cfg;
    single_cfg.crop_mode = false;
    single_cfg.input_width = crop_cfg.crop_grid.crop_width;
    single_cfg.input_height = crop_cfg.crop_grid.crop_height;
    Model<float> single = crop_model;
    single.cfg = single_cfg;

    const Image img = testutil::random_image(64, 32, seed + 1000);
    const Image direct = forward_image(crop_model, img);
    std::vector<Image> outs;
    for (const Image& crop : split_crops(img, crop_cfg.crop_grid))
      outs.push_back(forward_image(single, crop));
    const Image scripted = join_crops(outs, crop_cfg.crop_grid);
    expect(direct.data == scripted.data,
           "crop-mode mismatch at input " + std::to_string(seed));
  }
  return "20 random inputs bitwise-equal";
}

// ---------------------------------------------------------------------------
// 8. MSE against the clear image is nondecreasing in intensity.

std::string criterion_adversity_monotonicity() {
  const double ts[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (Condition c : {Condition::Fog, Condition::Rain, Condition::Snow}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Image img = testutil::random_image(48, 32, derive_seed(31, seed));
      double prev = -1.0;
      for (double t : ts) {
        const double mse =
            image_mse(apply_weather(img, WeatherSpec{c, t, seed}), img);
        expect(mse >= prev - 1e-12,
               std::string(to_string(c)) + " seed " + std::to_string(seed) +
                   ": mse(" + fmt(t) + ") = " + fmt(mse) + " < " + fmt(prev));
        prev = mse;
      }
    }
  }
  return "fog/rain/snow nondecreasing over t in {0,.25,.5,.75,1} on 20 images";
}

// ---------------------------------------------------------------------------
// 9. Two identically seeded CLI pipeline runs are byte-identical.

int run_cli(const std::string& args) {
  const std::string cmd = std::string(WUNET_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void run_pipeline(const fs::path& dir) {
  const std::string seed = "--seed 123 --threads 2 ";
  expect(run_cli(seed + "--out-dir " + (dir / "scenes").string() +
                 " scene-gen --count 8 --width 64 --height 32 --split test") == 0,
         "scene-gen failed");
  expect(run_cli(seed + "--out-dir " + (dir / "ext").string() +
                 " dataset extend --manifest " +
                 (dir / "scenes/manifest.jsonl").string()) == 0,
         "dataset extend failed");
  expect(run_cli(seed + "--out-dir " + (dir / "val").string() +
                 " dataset valsets --manifest " +
                 (dir / "scenes/manifest.jsonl").string()) == 0,
         "dataset valsets failed");
  expect(run_cli(seed + "--out-dir " + (dir / "eval").string() + " eval --sets " +
                 (dir / "val").string()) == 0,
         "eval failed");
}

std::string criterion_pipeline_determinism() {
  const auto a = testutil::temp_dir("acc_run_a");
  const auto b = testutil::temp_dir("acc_run_b");
  run_pipeline(a);
  run_pipeline(b);

  const std::set<std::string> kCompare = {".ppm", ".jsonl", ".csv"};
  std::vector<std::string> rel_paths;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    if (!kCompare.count(entry.path().extension().string())) continue;
    rel_paths.push_back(fs::relative(entry.path(), a).string());
  }
  expect(!rel_paths.empty(), "first run produced no artifacts");
  std::size_t images = 0, manifests = 0, reports = 0;
  for (const auto& rel : rel_paths) {
    const fs::path pa = a / rel, pb = b / rel;
    expect(fs::exists(pb), "second run missing " + rel);
    expect(testutil::same_bytes(pa, pb), "byte mismatch in " + rel);
    const auto ext = pa.extension().string();
    images += ext == ".ppm";
    manifests += ext == ".jsonl";
    reports += ext == ".csv";
  }
  return std::to_string(images) + " images, " + std::to_string(manifests) +
         " manifests, " + std::to_string(reports) + " reports byte-identical";
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::string name;
    std::function<std::string()> run;
  };

  FogTraining fog_training;
  try {
    std::cerr << "(training the fog model for criteria 5 and 6...)\n";
    fog_training = run_fog_training();
  } catch (const std::exception& e) {
    fog_training.error = e.what();
  }

  const std::vector<Criterion> criteria = {
      {1, "dataset arithmetic", criterion_dataset_arithmetic},
      {2, "gradient suite", criterion_gradients},
      {3, "AP oracle equivalence", criterion_ap_oracle},
      {4, "tiling and color invariants", criterion_imaging_invariants},
      {5, "training sanity", [&]() { return criterion_training_sanity(fog_training); }},
      {6, "detection recovery under fog",
       [&]() { return criterion_detection_recovery(fog_training); }},
      {7, "crop-mode equivalence", criterion_crop_equivalence},
      {8, "adversity monotonicity", criterion_adversity_monotonicity},
      {9, "pipeline determinism", criterion_pipeline_determinism},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
      detail = c.run();
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    const auto secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
    std::printf("[%s] %d. %s: %s (%.1fs)\n", ok ? "PASS" : "FAIL", c.id,
                c.name.c_str(), detail.c_str(), secs);
    std::fflush(stdout);
    failures += ok ? 0 : 1;
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - std::size_t(failures),
              criteria.size());
  return failures == 0 ? 0 : 1;
}
