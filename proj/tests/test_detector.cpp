#include <catch2/catch_amalgamated.hpp>

#include "support/test_util.hpp"
#include "wunet/detector.hpp"
#include "wunet/eval.hpp"
#include "wunet/scene.hpp"
#include "wunet/weather.hpp"

using namespace wunet;
namespace fs = std::filesystem;

TEST_CASE("blank images produce no detections") {
  Image img = Image::zeros(64, 32);
  for (auto& v : img.data) v = 0.5f;
  REQUIRE(blob_detect(img).empty());
}

TEST_CASE("background noise alone produces no detections") {
  SceneSpec spec;
  spec.seed = 10;
  spec.n_objects = 0;
  const auto scene = generate_scene(spec);
  REQUIRE(blob_detect(scene.image).empty());
}

TEST_CASE("one rectangle at contrast 0.5 becomes one tight detection") {
  SceneSpec spec;
  spec.seed = 3;
  spec.width = 128;
  spec.height = 64;
  spec.objects = {{0, 40, 20, 72, 38, 0.95}};  // ~0.5 above the background
  const auto scene = generate_scene(spec);
  const auto dets = blob_detect(scene.image, {}, "img");
  REQUIRE(dets.size() == 1);
  REQUIRE(iou(dets[0], scene.boxes[0]) > 0.8);
  REQUIRE(dets[0].class_id == 0);
  REQUIRE(dets[0].confidence > 0.0);
  REQUIRE(dets[0].confidence <= 1.0);
  REQUIRE(dets[0].image_id == "img");
}

TEST_CASE("dark rectangles are detected too") {
  SceneSpec spec;
  spec.seed = 4;
  spec.objects = {{0, 30, 20, 60, 36, 0.05}};
  const auto scene = generate_scene(spec);
  const auto dets = blob_detect(scene.image);
  REQUIRE(dets.size() == 1);
  REQUIRE(iou(dets[0], scene.boxes[0]) > 0.8);
}

TEST_CASE("tall thin rectangles classify as pedestrians") {
  SceneSpec spec;
  spec.seed = 5;
  spec.objects = {{1, 50, 12, 60, 44, 0.95}};  // 10 wide, 32 tall
  const auto scene = generate_scene(spec);
  const auto dets = blob_detect(scene.image);
  REQUIRE(dets.size() == 1);
  REQUIRE(dets[0].class_id == 1);
}

TEST_CASE("detections are deterministic") {
  SceneSpec spec;
  spec.seed = 6;
  spec.n_objects = 3;
  const auto scene = generate_scene(spec);
  const auto a = blob_detect(scene.image);
  const auto b = blob_detect(scene.image);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].left == b[i].left);
    REQUIRE(a[i].confidence == b[i].confidence);
  }
}

TEST_CASE("heavy fog suppresses detections") {
  int clear_total = 0, foggy_total = 0;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    SceneSpec spec;
    spec.seed = derive_seed(100, seed);
    spec.n_objects = 3;
    const auto scene = generate_scene(spec);
    clear_total += int(blob_detect(scene.image).size());
    const Image foggy = apply_fog(scene.image, 0.9, seed);
    foggy_total += int(blob_detect(foggy).size());
  }
  REQUIRE(clear_total > foggy_total);
}

TEST_CASE("evaluate_set scores a clear set near perfectly") {
  const auto dir = testutil::temp_dir("eval_set");
  fs::create_directories(dir / "images");
  fs::create_directories(dir / "labels");
  std::vector<SampleRecord> records;
  for (int i = 0; i < 4; ++i) {
    SceneSpec spec;
    spec.seed = derive_seed(7, std::uint64_t(i));
    spec.n_objects = 2;
    const auto scene = generate_scene(spec);
    const std::string id = "s" + std::to_string(i);
    write_ppm(scene.image, (dir / "images" / (id + ".ppm")).string());
    write_kitti_labels(scene.boxes, (dir / "labels" / (id + ".txt")).string());
    SampleRecord rec;
    rec.id = id;
    rec.image_path = "images/" + id + ".ppm";
    rec.clear_ref = rec.image_path;
    rec.labels_path = "labels/" + id + ".txt";
    rec.split = Split::Val;
    records.push_back(rec);
  }
  const auto report = evaluate_set("normal", records, dir, nullptr);
  REQUIRE(report.images == 4);
  REQUIRE(report.mse == 0.0);  // the set is its own clear reference
  REQUIRE(report.map > 0.8);

  SECTION("external detections replace the built-in detector") {
    DetectionsById external;
    // Perfect hand-fed detections for image s0 only.
    const auto gts = parse_kitti_labels((dir / "labels/s0.txt").string());
    for (const auto& g : gts) {
      Detection d;
      d.class_id = g.class_id;
      d.left = g.left;
      d.top = g.top;
      d.right = g.right;
      d.bottom = g.bottom;
      d.confidence = 0.9;
      external["val/s0"].push_back(d);
    }
    EvalOptions opt;
    opt.external_key_prefix = "val/";
    const auto ext_report =
        evaluate_set("val", records, dir, nullptr, opt, &external);
    REQUIRE(ext_report.images == 4);
    // Only a quarter of the ground truth is covered: recall caps the AP.
    REQUIRE(ext_report.map < report.map);
  }

  SECTION("missing clear_ref raises a data error naming the record") {
    auto broken = records;
    broken[0].clear_ref = "images/absent.ppm";
    REQUIRE_THROWS_AS(evaluate_set("broken", broken, dir, nullptr), DataError);
  }
}
