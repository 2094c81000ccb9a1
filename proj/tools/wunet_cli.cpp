// Command-line entry point for the weather-robustification pipeline:
// synthetic scene generation, adverse-weather augmentation, dataset
// construction, WUNet training, denoising, and detection evaluation.
//
// Exit codes: 0 success, 1 data error, 2 configuration/usage error.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wunet/wunet.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOptions {
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out_dir = "out";
};

void write_config_log(const GlobalOptions& g, const std::string& command,
                      json extra) {
  fs::create_directories(g.out_dir);
  json cfg;
  cfg["command"] = command;
  cfg["seed"] = g.seed;
  cfg["threads"] = g.threads;
  cfg["out_dir"] = g.out_dir;
  cfg["options"] = std::move(extra);
  cfg["ap_interpolation"] = "all_points";
  std::ofstream out(fs::path(g.out_dir) / "config.json", std::ios::trunc);
  out << cfg.dump(2) << "\n";
}

std::vector<fs::path> sorted_files(const fs::path& dir,
                                   const std::string& extension) {
  if (!fs::is_directory(dir))
    throw wunet::DataError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == extension)
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  return files;
}

// ---------------------------------------------------------------------------

struct SceneGenOptions {
  int count = 16;
  int width = 128;
  int height = 64;
  int objects = 3;
  std::string split = "train";
};

int run_scene_gen(const GlobalOptions& g, const SceneGenOptions& o) {
  write_config_log(g, "scene-gen",
                   json{{"count", o.count},
                        {"width", o.width},
                        {"height", o.height},
                        {"objects", o.objects},
                        {"split", o.split}});
  const fs::path out(g.out_dir);
  fs::create_directories(out / "images");
  fs::create_directories(out / "labels");
  std::vector<wunet::SampleRecord> records(std::size_t(o.count));
  wunet::parallel_for(std::size_t(o.count), g.threads, [&](std::size_t i) {
    char name[32];
    std::snprintf(name, sizeof(name), "scene_%04zu", i);
    wunet::SceneSpec spec;
    spec.seed = wunet::derive_seed(g.seed, name);
    spec.width = o.width;
    spec.height = o.height;
    spec.n_objects = o.objects;
    const auto scene = wunet::generate_scene(spec);
    wunet::write_ppm(scene.image, (out / "images" / (std::string(name) + ".ppm")).string());
    wunet::write_kitti_labels(scene.boxes,
                              (out / "labels" / (std::string(name) + ".txt")).string());
    wunet::SampleRecord rec;
    rec.id = name;
    rec.image_path = "images/" + std::string(name) + ".ppm";
    rec.variant = wunet::Variant::Clear;
    rec.clear_ref = rec.image_path;
    rec.labels_path = "labels/" + std::string(name) + ".txt";
    rec.split = wunet::split_from_string(o.split);
    records[i] = std::move(rec);
  });
  wunet::write_manifest(records, (out / "manifest.jsonl").string());
  std::cout << "wrote " << o.count << " scenes to " << g.out_dir << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct AugmentOptions {
  std::string input;
  std::string condition = "fog";
  double intensity = 0.5;
};

int run_augment(const GlobalOptions& g, const AugmentOptions& o) {
  const wunet::Condition condition = wunet::condition_from_string(o.condition);
  if (condition == wunet::Condition::None)
    throw wunet::ConfigError("augment: choose fog, rain, or snow");
  if (o.intensity < 0.0 || o.intensity > 1.0)
    throw wunet::ConfigError("augment: intensity must lie in [0,1]");
  write_config_log(g, "augment",
                   json{{"input", o.input},
                        {"condition", o.condition},
                        {"intensity", o.intensity}});
  const auto files = sorted_files(o.input, ".ppm");
  const fs::path out(g.out_dir);
  fs::create_directories(out);
  wunet::parallel_for(files.size(), g.threads, [&](std::size_t i) {
    const auto& path = files[i];
    wunet::WeatherSpec spec;
    spec.condition = condition;
    spec.intensity = o.intensity;
    spec.seed = wunet::derive_seed(g.seed, path.filename().string());
    const auto img = wunet::read_ppm(path.string());
    wunet::write_ppm(wunet::apply_weather(img, spec),
                     (out / path.filename()).string());
  });
  std::cout << "augmented " << files.size() << " images into " << g.out_dir << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

int run_dataset_extend(const GlobalOptions& g, const std::string& manifest) {
  write_config_log(g, "dataset extend", json{{"manifest", manifest}});
  const auto records = wunet::read_manifest(manifest);
  const auto out = wunet::extend_dataset(records, fs::path(manifest).parent_path(),
                                         g.out_dir, g.seed, g.threads);
  std::cout << "extended " << records.size() << " records to " << out.size()
            << " in " << g.out_dir << "\n";
  return 0;
}

int run_dataset_valsets(const GlobalOptions& g, const std::string& manifest) {
  write_config_log(g, "dataset valsets", json{{"manifest", manifest}});
  const auto records = wunet::read_manifest(manifest);
  const auto sets = wunet::build_validation_sets(
      records, fs::path(manifest).parent_path(), g.out_dir, g.seed, g.threads);
  std::cout << "built " << sets.size() << " validation sets of "
            << records.size() << " images in " << g.out_dir << "\n";
  return 0;
}

int run_dataset_cropify(const GlobalOptions& g, const std::string& manifest,
                        int cols, int rows) {
  write_config_log(g, "dataset cropify",
                   json{{"manifest", manifest}, {"cols", cols}, {"rows", rows}});
  const auto records = wunet::read_manifest(manifest);
  if (records.empty()) throw wunet::DataError("empty manifest: " + manifest);
  const auto first = wunet::read_ppm(wunet::resolve_path(
      fs::path(manifest).parent_path(), records.front().image_path));
  const auto grid = wunet::make_crop_grid(cols, rows, first.width, first.height);
  const auto out =
      wunet::cropify_dataset(records, fs::path(manifest).parent_path(),
                             g.out_dir, grid, g.threads);
  std::cout << "cropified " << records.size() << " records to " << out.size()
            << " in " << g.out_dir << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct TrainOptions {
  std::string train_manifest;
  std::string test_manifest;
  std::string config_file;
  // -1 / empty mean "not set here"; precedence: flag > config file > default.
  int epochs = -1;
  int batch_size = -1;
  double lr = -1.0;
  int depth = -1;
  int base_channels = -1;
  std::string color_space;
  int crop_cols = -1;
  int crop_rows = -1;
};

int run_train(const GlobalOptions& g, const TrainOptions& o) {
  json file_cfg;
  if (!o.config_file.empty()) {
    std::ifstream in(o.config_file);
    if (!in) throw wunet::DataError("cannot open config " + o.config_file);
    try {
      in >> file_cfg;
    } catch (const json::exception& e) {
      throw wunet::ConfigError("config " + o.config_file + ": " + e.what());
    }
  }
  auto pick_int = [&](int flag, const char* key, int fallback) {
    if (flag >= 0) return flag;
    if (file_cfg.contains(key)) return file_cfg.at(key).get<int>();
    return fallback;
  };
  auto pick_double = [&](double flag, const char* key, double fallback) {
    if (flag >= 0.0) return flag;
    if (file_cfg.contains(key)) return file_cfg.at(key).get<double>();
    return fallback;
  };

  const auto train_records = wunet::read_manifest(o.train_manifest);
  const auto test_records = wunet::read_manifest(o.test_manifest);
  if (train_records.empty())
    throw wunet::DataError("empty training manifest: " + o.train_manifest);
  if (test_records.empty())
    throw wunet::DataError("empty test manifest: " + o.test_manifest);
  const fs::path train_base = fs::path(o.train_manifest).parent_path();
  const fs::path test_base = fs::path(o.test_manifest).parent_path();

  // Sample size comes from the data; crop grids scale it back up to the
  // full-frame size the deployed model will see.
  const auto first = wunet::read_ppm(
      wunet::resolve_path(train_base, train_records.front().image_path));

  wunet::WUNetConfig cfg;
  cfg.depth = pick_int(o.depth, "depth", 3);
  cfg.base_channels = pick_int(o.base_channels, "base_channels", 16);
  std::string space = o.color_space;
  if (space.empty() && file_cfg.contains("color_space"))
    space = file_cfg.at("color_space").get<std::string>();
  if (space.empty()) space = "rgb";
  if (space != "rgb" && space != "hsv")
    throw wunet::ConfigError("color_space must be rgb or hsv");
  cfg.color_space = space == "hsv" ? wunet::ColorSpace::HSV : wunet::ColorSpace::RGB;
  const int crop_cols = pick_int(o.crop_cols, "crop_cols", 0);
  const int crop_rows = pick_int(o.crop_rows, "crop_rows", 0);
  if ((crop_cols > 0) != (crop_rows > 0))
    throw wunet::ConfigError("crop_cols and crop_rows must be set together");
  if (crop_cols > 0) {
    cfg.crop_mode = true;
    cfg.crop_grid = wunet::CropGrid{crop_cols, crop_rows, first.width, first.height};
    cfg.input_width = crop_cols * first.width;
    cfg.input_height = crop_rows * first.height;
  } else {
    cfg.input_width = first.width;
    cfg.input_height = first.height;
  }
  cfg.validate();

  wunet::TrainConfig tc;
  tc.epochs = pick_int(o.epochs, "epochs", 200);
  tc.batch_size = pick_int(o.batch_size, "batch_size", cfg.crop_mode ? 160 : 24);
  tc.lr = pick_double(o.lr, "lr", 0.01);
  tc.seed = g.seed;
  tc.checkpoint_dir = g.out_dir;

  write_config_log(g, "train",
                   json{{"train", o.train_manifest},
                        {"test", o.test_manifest},
                        {"config_file", o.config_file},
                        {"depth", cfg.depth},
                        {"base_channels", cfg.base_channels},
                        {"color_space", space},
                        {"crop_cols", crop_cols},
                        {"crop_rows", crop_rows},
                        {"input_width", cfg.input_width},
                        {"input_height", cfg.input_height},
                        {"epochs", tc.epochs},
                        {"batch_size", tc.batch_size},
                        {"lr", tc.lr}});

  auto model = wunet::build_model<float>(cfg, g.seed);
  const auto train_pairs = wunet::load_sample_pairs(train_records, train_base, cfg);
  const auto test_pairs = wunet::load_sample_pairs(test_records, test_base, cfg);
  const auto result = wunet::train(model, train_pairs, test_pairs, tc);
  std::cout << "best epoch " << result.best_epoch << " test_mse "
            << result.best_test_mse << "\ncheckpoint: " << result.best_path
            << "\nlog: " << result.log_path << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct DenoiseOptions {
  std::string model;
  std::string input;
  std::string output;
};

int run_denoise(const GlobalOptions& g, const DenoiseOptions& o) {
  write_config_log(g, "denoise",
                   json{{"model", o.model}, {"input", o.input}, {"output", o.output}});
  const auto ckpt = wunet::load_checkpoint(o.model);
  const auto files = sorted_files(o.input, ".ppm");
  fs::create_directories(o.output);
  wunet::parallel_for(files.size(), g.threads, [&](std::size_t i) {
    const auto img = wunet::read_ppm(files[i].string());
    wunet::write_ppm(wunet::forward_image(ckpt.model, img),
                     (fs::path(o.output) / files[i].filename()).string());
  });
  std::cout << "denoised " << files.size() << " images into " << o.output << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct EvalOptions {
  std::string sets_dir;
  std::string model;
  std::string detections;
};

int run_eval(const GlobalOptions& g, const EvalOptions& o) {
  write_config_log(g, "eval",
                   json{{"sets", o.sets_dir},
                        {"model", o.model},
                        {"detections", o.detections}});
  std::optional<wunet::LoadedCheckpoint> ckpt;
  if (!o.model.empty()) ckpt = wunet::load_checkpoint(o.model);
  wunet::DetectionsById external;
  if (!o.detections.empty())
    external = wunet::read_detections_jsonl(o.detections);

  const auto manifests = sorted_files(o.sets_dir, ".jsonl");
  if (manifests.empty())
    throw wunet::DataError("no .jsonl manifests under " + o.sets_dir);
  std::vector<wunet::SetReport> reports;
  for (const auto& manifest : manifests) {
    const std::string set_name = manifest.stem().string();
    const auto records = wunet::read_manifest(manifest.string());
    wunet::EvalOptions opt;
    opt.threads = g.threads;
    opt.external_key_prefix = set_name + "/";
    reports.push_back(wunet::evaluate_set(
        set_name, records, o.sets_dir, nullptr, opt,
        o.detections.empty() ? nullptr : &external));
    if (ckpt) {
      reports.push_back(wunet::evaluate_set(set_name + "+wunet", records,
                                            o.sets_dir, &ckpt->model, opt));
    }
  }
  fs::create_directories(g.out_dir);
  const std::string report_path = (fs::path(g.out_dir) / "report.csv").string();
  wunet::emit_report(reports, report_path);
  std::cout << "wrote " << reports.size() << " rows to " << report_path << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

int run_report(const GlobalOptions& g, const std::string& runs_dir) {
  write_config_log(g, "report", json{{"runs", runs_dir}});
  if (!fs::is_directory(runs_dir))
    throw wunet::DataError("not a directory: " + runs_dir);
  std::vector<fs::path> inputs;
  for (const auto& entry : fs::recursive_directory_iterator(runs_dir))
    if (entry.is_regular_file() && entry.path().filename() == "report.csv")
      inputs.push_back(entry.path());
  std::sort(inputs.begin(), inputs.end());
  if (inputs.empty())
    throw wunet::DataError("no report.csv files under " + runs_dir);

  fs::create_directories(g.out_dir);
  const fs::path combined = fs::path(g.out_dir) / "combined.csv";
  std::ofstream out(combined, std::ios::trunc);
  out << "run,set,images,mse,map,ap_car,ap_pedestrian\n";
  for (const auto& input : inputs) {
    const std::string run =
        fs::relative(input.parent_path(), runs_dir).string();
    std::ifstream in(input);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
      if (header) {
        header = false;
        continue;
      }
      if (!line.empty()) out << run << "," << line << "\n";
    }
  }
  std::cout << "wrote " << combined.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adverse-weather robustification pipeline: synthesize weather, "
               "train a UNet denoiser, and measure the detection impact."};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--seed", g.seed, "global RNG seed");
  app.add_option("--threads", g.threads, "worker threads for dataset/eval maps");
  app.add_option("--out-dir", g.out_dir, "output directory");

  SceneGenOptions scene_opts;
  auto* scene = app.add_subcommand("scene-gen", "generate synthetic labeled road scenes");
  scene->add_option("--count", scene_opts.count, "number of scenes");
  scene->add_option("--width", scene_opts.width, "scene width in pixels");
  scene->add_option("--height", scene_opts.height, "scene height in pixels");
  scene->add_option("--objects", scene_opts.objects, "objects per scene");
  scene->add_option("--split", scene_opts.split, "split tag (train|test|val)");

  AugmentOptions aug_opts;
  auto* augment = app.add_subcommand("augment", "apply one weather condition to a directory of PPMs");
  augment->add_option("--input", aug_opts.input, "input directory")->required();
  augment->add_option("--condition", aug_opts.condition, "fog|rain|snow")->required();
  augment->add_option("--intensity", aug_opts.intensity, "intensity in [0,1]")->required();

  auto* dataset = app.add_subcommand("dataset", "dataset construction");
  dataset->require_subcommand(1);
  std::string extend_manifest, valsets_manifest, cropify_manifest;
  int crop_cols = 4, crop_rows = 2;
  auto* extend = dataset->add_subcommand("extend", "4x adverse-weather expansion");
  extend->add_option("--manifest", extend_manifest, "clear manifest")->required();
  auto* valsets = dataset->add_subcommand("valsets", "build the 10 graded validation sets");
  valsets->add_option("--manifest", valsets_manifest, "clear test manifest")->required();
  auto* cropify = dataset->add_subcommand("cropify", "split every sample into a crop grid");
  cropify->add_option("--manifest", cropify_manifest, "source manifest")->required();
  cropify->add_option("--cols", crop_cols, "grid columns");
  cropify->add_option("--rows", crop_rows, "grid rows");

  TrainOptions train_opts;
  auto* train = app.add_subcommand("train", "train a WUNet denoiser");
  train->add_option("--train", train_opts.train_manifest, "training manifest")->required();
  train->add_option("--test", train_opts.test_manifest, "test manifest")->required();
  train->add_option("--config", train_opts.config_file, "JSON config file");
  train->add_option("--epochs", train_opts.epochs, "training epochs");
  train->add_option("--batch-size", train_opts.batch_size, "minibatch size");
  train->add_option("--lr", train_opts.lr, "learning rate");
  train->add_option("--depth", train_opts.depth, "encoder levels");
  train->add_option("--base-channels", train_opts.base_channels, "channels at level 0");
  train->add_option("--color-space", train_opts.color_space, "rgb|hsv");
  train->add_option("--crop-cols", train_opts.crop_cols, "crop grid columns");
  train->add_option("--crop-rows", train_opts.crop_rows, "crop grid rows");

  DenoiseOptions den_opts;
  auto* denoise = app.add_subcommand("denoise", "run a checkpoint over a directory of PPMs");
  denoise->add_option("--model", den_opts.model, "checkpoint path")->required();
  denoise->add_option("--input", den_opts.input, "input directory")->required();
  denoise->add_option("--output", den_opts.output, "output directory")->required();

  EvalOptions eval_opts;
  auto* eval = app.add_subcommand("eval", "evaluate validation sets with and without denoising");
  eval->add_option("--sets", eval_opts.sets_dir, "directory of set manifests")->required();
  eval->add_option("--model", eval_opts.model, "checkpoint path (adds +wunet rows)");
  eval->add_option("--detections", eval_opts.detections,
                   "external detections JSONL keyed by <set>/<image id>");

  std::string runs_dir;
  auto* report = app.add_subcommand("report", "merge run reports into one CSV");
  report->add_option("--runs", runs_dir, "directory containing eval runs")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help() << "\n";
    return 2;
  }

  try {
    if (*scene) return run_scene_gen(g, scene_opts);
    if (*augment) return run_augment(g, aug_opts);
    if (*extend) return run_dataset_extend(g, extend_manifest);
    if (*valsets) return run_dataset_valsets(g, valsets_manifest);
    if (*cropify) return run_dataset_cropify(g, cropify_manifest, crop_cols, crop_rows);
    if (*train) return run_train(g, train_opts);
    if (*denoise) return run_denoise(g, den_opts);
    if (*eval) return run_eval(g, eval_opts);
    if (*report) return run_report(g, runs_dir);
  } catch (const wunet::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const wunet::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
