#include <doctest.h>

#include <cmath>

#include "boxlift/errors.hpp"
#include "boxlift/lift.hpp"
#include "oracles.hpp"

using namespace boxlift;

namespace {

Cluster all_indices(const PointCloud& cloud) {
  Cluster c;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    c.indices.push_back(static_cast<std::int32_t>(i));
  }
  return c;
}

Box2D rect2d(double x_min, double y_min, double x_max, double y_max) {
  Box2D b;
  b.x_min = x_min;
  b.y_min = y_min;
  b.x_max = x_max;
  b.y_max = y_max;
  return b;
}

bool same_partition(const std::vector<Cluster>& a, const std::vector<Cluster>& b) {
  if (a.size() != b.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].indices != b[i].indices) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_SUITE("lift") {

TEST_CASE("frustum_points selects exactly the points projecting into the detection") {
  CameraIntrinsics cam{100.0, 100.0, 50.0, 50.0, 100, 100};
  RigidTransform identity;
  PointCloud cloud;
  cloud.points.push_back({0.0, 0.0, 10.0});    // pixel (50, 50), inside
  cloud.points.push_back({-3.0, 0.0, 10.0});   // pixel (20, 50), outside box
  cloud.points.push_back({0.0, 0.0, -10.0});   // behind camera
  cloud.points.push_back({1.0, 1.0, 10.0});    // pixel (60, 60), inside
  const Box2D det = rect2d(40.0, 40.0, 70.0, 70.0);

  const Cluster c = frustum_points(cloud, det, nullptr, identity, cam);
  REQUIRE(c.size() == 2);
  CHECK(c.indices[0] == 0);
  CHECK(c.indices[1] == 3);
}

TEST_CASE("frustum_points respects the instance mask") {
  CameraIntrinsics cam{100.0, 100.0, 50.0, 50.0, 100, 100};
  RigidTransform identity;
  PointCloud cloud;
  cloud.points.push_back({0.0, 0.0, 10.0});  // pixel (50, 50)
  cloud.points.push_back({1.0, 1.0, 10.0});  // pixel (60, 60)
  const Box2D det = rect2d(40.0, 40.0, 70.0, 70.0);

  SegMask mask;
  mask.camera_id = 0;
  mask.box_index = 0;
  mask.width = 100;
  mask.height = 100;
  mask.bitmap.assign(100 * 100, 0);
  mask.bitmap[50 * 100 + 50] = 1;  // only the center pixel

  const Cluster c = frustum_points(cloud, det, &mask, identity, cam);
  REQUIRE(c.size() == 1);
  CHECK(c.indices[0] == 0);
}

TEST_CASE("frustum_points honors the candidate subset") {
  CameraIntrinsics cam{100.0, 100.0, 50.0, 50.0, 100, 100};
  RigidTransform identity;
  PointCloud cloud;
  cloud.points.push_back({0.0, 0.0, 10.0});
  cloud.points.push_back({0.5, 0.5, 10.0});
  const Box2D det = rect2d(0.0, 0.0, 100.0, 100.0);

  const std::vector<std::int32_t> only_second{1};
  const Cluster c = frustum_points(cloud, det, nullptr, identity, cam, &only_second);
  REQUIRE(c.size() == 1);
  CHECK(c.indices[0] == 1);

  const std::vector<std::int32_t> none;
  CHECK(frustum_points(cloud, det, nullptr, identity, cam, &none).size() == 0);
}

TEST_CASE("region_grow matches the BFS oracle on random clouds") {
  test::XorShift64 rng(101);
  for (int trial = 0; trial < 50; ++trial) {
    PointCloud cloud;
    for (int i = 0; i < 120; ++i) {
      cloud.points.push_back(
          {8.0 * rng.uniform(), 8.0 * rng.uniform(), 2.0 * rng.uniform()});
    }
    const Cluster seeds = all_indices(cloud);
    for (int min_cluster : {1, 5}) {
      const auto fast = region_grow(cloud, seeds, 0.5, min_cluster);
      const auto slow = test::bfs_clusters(cloud, seeds, 0.5, min_cluster);
      CHECK(same_partition(fast, slow));
    }
  }
}

TEST_CASE("region_grow boundary distance is inclusive") {
  PointCloud cloud;
  cloud.points.push_back({0.0, 0.0, 0.0});
  cloud.points.push_back({0.5, 0.0, 0.0});  // exactly epsilon away
  cloud.points.push_back({1.01, 0.0, 0.0});
  const auto clusters = region_grow(cloud, all_indices(cloud), 0.5, 1);
  REQUIRE(clusters.size() == 2);
  CHECK(clusters[0].indices == std::vector<std::int32_t>{0, 1});
  CHECK(clusters[1].indices == std::vector<std::int32_t>{2});
}

TEST_CASE("densest_cluster prefers size then smallest index") {
  std::vector<Cluster> clusters;
  clusters.push_back({{5, 6, 7}});
  clusters.push_back({{0, 1, 2}});  // same size, contains the smallest index
  clusters.push_back({{3, 4}});
  const Cluster& best = densest_cluster(clusters);
  CHECK(best.indices == std::vector<std::int32_t>{0, 1, 2});

  clusters.push_back({{8, 9, 10, 11}});
  CHECK(densest_cluster(clusters).indices == std::vector<std::int32_t>{8, 9, 10, 11});

  CHECK_THROWS_AS(densest_cluster({}), Error);
}

TEST_CASE("estimate_box inflates degenerate extents") {
  PointCloud cloud;
  cloud.points.push_back({1.0, 2.0, 3.0});
  cloud.points.push_back({2.0, 2.0, 3.0});  // varies only in x
  Cluster c{{0, 1}};
  const Box3D box = estimate_box(c, cloud, 0.1);
  CHECK(box.l == doctest::Approx(1.0));
  CHECK(box.w == doctest::Approx(0.1));
  CHECK(box.h == doctest::Approx(0.1));
  CHECK(box.center.x == doctest::Approx(1.5));
  CHECK(box.center.y == doctest::Approx(2.0));

  CHECK_THROWS_AS(estimate_box(Cluster{}, cloud, 0.1), Error);
}

TEST_CASE("lift_frame recovers a single planted object") {
  // Ground plane at z = -1.8 plus one dense block at 10 m ahead.
  test::XorShift64 rng(202);
  Frame frame;
  frame.frame_id = 0;
  frame.timestamp = 0.0;
  for (int i = 0; i < 2000; ++i) {
    frame.points.points.push_back(
        {30.0 * (rng.uniform() - 0.5), 30.0 * (rng.uniform() - 0.5), -1.8});
  }
  Box3D target;
  target.center = {10.0, 0.0, -0.9};
  target.l = 4.0;
  target.w = 2.0;
  target.h = 1.8;
  for (int i = 0; i < 400; ++i) {
    frame.points.points.push_back({target.center.x + target.l * (rng.uniform() - 0.5),
                                   target.center.y + target.w * (rng.uniform() - 0.5),
                                   target.center.z + target.h * (rng.uniform() - 0.5)});
  }

  CameraModel cam;
  cam.camera_id = 0;
  cam.intrinsics = {800.0, 800.0, 800.0, 450.0, 1600, 900};
  // Camera frame: x right (-y lidar), y down (-z lidar), z forward (+x lidar).
  cam.lidar_to_camera.rotation = {0.0, -1.0, 0.0, 0.0, 0.0, -1.0, 1.0, 0.0, 0.0};
  frame.cameras.push_back(cam);
  frame.detections2d.resize(1);
  Box2D det = rect2d(600.0, 300.0, 1000.0, 600.0);
  det.score = 0.9;
  frame.detections2d[0].push_back(det);

  const LiftResult result = lift_frame_detailed(frame, LiftConfig{});
  REQUIRE(result.ground.has_value());
  CHECK(std::abs(result.ground->offset - 1.8) < 0.05);
  REQUIRE(result.boxes.size() == 1);
  const Box3D& box = result.boxes[0].box;
  CHECK(std::abs(box.center.x - target.center.x) < 0.5);
  CHECK(std::abs(box.center.y - target.center.y) < 0.5);
  CHECK(box.score == doctest::Approx(0.9));
  CHECK(result.boxes[0].camera_id == 0);
  CHECK(result.boxes[0].detection_index == 0);
}

TEST_CASE("lift_frame survives an unfittable ground plane") {
  // Too few points for RANSAC: the frame degrades to no ground removal.
  Frame frame;
  frame.points.points.push_back({10.0, 0.0, 0.0});
  CameraModel cam;
  cam.camera_id = 0;
  cam.intrinsics = {800.0, 800.0, 800.0, 450.0, 1600, 900};
  cam.lidar_to_camera.rotation = {0.0, -1.0, 0.0, 0.0, 0.0, -1.0, 1.0, 0.0, 0.0};
  frame.cameras.push_back(cam);
  frame.detections2d.resize(1);
  const LiftResult result = lift_frame_detailed(frame, LiftConfig{});
  CHECK(!result.ground.has_value());
  CHECK(result.boxes.empty());
}

}  // TEST_SUITE
