#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>

#include "boxlift/errors.hpp"
#include "boxlift/scene_io.hpp"
#include "boxlift/synth.hpp"

using namespace boxlift;

namespace {

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("boxlift_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

bool same_vec(const Vec3& a, const Vec3& b) { return a.x == b.x && a.y == b.y && a.z == b.z; }

}  // namespace

TEST_SUITE("scene_io") {

TEST_CASE("rle round trip and hand case") {
  const std::vector<std::uint8_t> bitmap{0, 0, 1, 1, 0};
  const auto runs = rle_encode(bitmap);
  CHECK(runs == std::vector<std::int64_t>{2, 2, 1});
  CHECK(rle_decode(runs, bitmap.size()) == bitmap);

  // Leading one means a zero-length first run.
  const std::vector<std::uint8_t> ones{1, 1, 1};
  const auto ones_runs = rle_encode(ones);
  CHECK(ones_runs == std::vector<std::int64_t>{0, 3});
  CHECK(rle_decode(ones_runs, 3) == ones);

  CHECK(rle_encode({}).empty());
  CHECK(rle_decode({}, 0).empty());
}

TEST_CASE("rle rejects malformed runs") {
  CHECK_THROWS_AS(rle_decode({-1, 6}, 5), Error);
  CHECK_THROWS_AS(rle_decode({2, 2}, 5), Error);  // sums to 4, not 5
}

TEST_CASE("catalog round trip") {
  TextCatalog catalog;
  catalog.entries.push_back({"car", FeatureVec{{0.25, -0.5, 0.125}}});
  catalog.entries.push_back({"pedestrian", FeatureVec{{1.0, 0.0, 0.0}}});
  const auto path = fresh_dir("catalog") / "catalog.json";
  std::filesystem::create_directories(path.parent_path());
  save_catalog(path.string(), catalog);
  const TextCatalog back = load_catalog(path.string());
  REQUIRE(back.entries.size() == 2);
  CHECK(back.entries[0].name == "car");
  CHECK(back.entries[0].embedding.values == catalog.entries[0].embedding.values);
  CHECK(back.entries[1].name == "pedestrian");
}

TEST_CASE("scene save and load round trip bit-exactly") {
  SynthConfig cfg;
  cfg.seed = 12;
  cfg.n_frames = 3;
  cfg.objects_per_class = {{"car", 2}, {"pedestrian", 2}};
  cfg.ground_points = 500;
  cfg.points_per_object_10m = 100.0;
  cfg.n_cameras = 2;
  cfg.with_masks = true;
  const Scene scene = generate_synthetic(cfg);

  const auto dir = fresh_dir("roundtrip");
  save_scene(scene, dir.string());
  const Scene back = load_scene(dir.string());

  CHECK(back.scene_id == scene.scene_id);
  REQUIRE(back.frames.size() == scene.frames.size());
  REQUIRE(back.catalog.entries.size() == scene.catalog.entries.size());
  for (std::size_t i = 0; i < scene.catalog.entries.size(); ++i) {
    CHECK(back.catalog.entries[i].name == scene.catalog.entries[i].name);
    CHECK(back.catalog.entries[i].embedding.values == scene.catalog.entries[i].embedding.values);
  }
  REQUIRE(back.priors.size() == scene.priors.size());
  for (std::size_t i = 0; i < scene.priors.size(); ++i) {
    CHECK(back.priors[i].class_name == scene.priors[i].class_name);
    CHECK(back.priors[i].w == scene.priors[i].w);
  }

  for (std::size_t f = 0; f < scene.frames.size(); ++f) {
    const Frame& a = scene.frames[f];
    const Frame& b = back.frames[f];
    CHECK(a.frame_id == b.frame_id);
    CHECK(a.timestamp == b.timestamp);
    CHECK(a.ego_pose.ego_to_global.translation.x == b.ego_pose.ego_to_global.translation.x);
    CHECK(a.ego_pose.lidar_to_ego.translation.z == b.ego_pose.lidar_to_ego.translation.z);

    // Point payloads are float32 on disk; the generator quantizes at creation
    // so the round trip is exact.
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
      CHECK(same_vec(a.points.points[i], b.points.points[i]));
    }

    REQUIRE(a.features2d.size() == b.features2d.size());
    for (std::size_t i = 0; i < a.features2d.size(); ++i) {
      CHECK(a.features2d[i].values == b.features2d[i].values);
    }

    REQUIRE(a.cameras.size() == b.cameras.size());
    for (std::size_t c = 0; c < a.cameras.size(); ++c) {
      CHECK(a.cameras[c].camera_id == b.cameras[c].camera_id);
      CHECK(a.cameras[c].intrinsics.fx == b.cameras[c].intrinsics.fx);
      CHECK(a.cameras[c].lidar_to_camera.rotation == b.cameras[c].lidar_to_camera.rotation);
      REQUIRE(a.detections2d[c].size() == b.detections2d[c].size());
      for (std::size_t d = 0; d < a.detections2d[c].size(); ++d) {
        CHECK(a.detections2d[c][d].x_min == b.detections2d[c][d].x_min);
        CHECK(a.detections2d[c][d].score == b.detections2d[c][d].score);
        CHECK(a.detections2d[c][d].feature_id == b.detections2d[c][d].feature_id);
      }
    }

    REQUIRE(a.masks.size() == b.masks.size());
    for (std::size_t m = 0; m < a.masks.size(); ++m) {
      CHECK(a.masks[m].camera_id == b.masks[m].camera_id);
      CHECK(a.masks[m].box_index == b.masks[m].box_index);
      CHECK(a.masks[m].bitmap == b.masks[m].bitmap);
    }

    REQUIRE(a.gt_boxes.size() == b.gt_boxes.size());
    for (std::size_t g = 0; g < a.gt_boxes.size(); ++g) {
      CHECK(a.gt_boxes[g].class_name == b.gt_boxes[g].class_name);
      CHECK(same_vec(a.gt_boxes[g].box.center, b.gt_boxes[g].box.center));
      CHECK(a.gt_boxes[g].box.w == b.gt_boxes[g].box.w);
    }
  }
}

TEST_CASE("load_scene rejects a missing directory") {
  CHECK_THROWS_AS(load_scene("/nonexistent/boxlift_scene"), Error);
}

TEST_CASE("load_scene rejects a bad version and malformed json") {
  SynthConfig cfg;
  cfg.seed = 5;
  cfg.n_frames = 1;
  cfg.objects_per_class = {{"car", 1}};
  cfg.ground_points = 200;
  cfg.n_cameras = 1;
  const Scene scene = generate_synthetic(cfg);

  const auto dir = fresh_dir("badversion");
  save_scene(scene, dir.string());
  {
    std::ifstream in(dir / "manifest.json");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto pos = text.find("\"version\": 1");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 12, "\"version\": 9");
    std::ofstream out(dir / "manifest.json");
    out << text;
  }
  try {
    load_scene(dir.string());
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kVersion);
  }

  const auto dir2 = fresh_dir("badjson");
  std::filesystem::create_directories(dir2);
  std::ofstream(dir2 / "manifest.json") << "{ not json";
  try {
    load_scene(dir2.string());
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kParse);
  }
}

}  // TEST_SUITE
