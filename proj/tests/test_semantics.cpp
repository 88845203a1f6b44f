#include <doctest.h>

#include <cmath>

#include "boxlift/errors.hpp"
#include "boxlift/semantics.hpp"

using namespace boxlift;

namespace {

// Camera at the LiDAR origin looking down +x: x_cam = -y, y_cam = -z,
// z_cam = +x.
RigidTransform forward_camera() {
  RigidTransform t;
  t.rotation = {0.0, -1.0, 0.0, 0.0, 0.0, -1.0, 1.0, 0.0, 0.0};
  return t;
}

CameraIntrinsics test_intrinsics() { return {800.0, 800.0, 800.0, 450.0, 1600, 900}; }

Box3D box_at(double x, double y, double z, double w, double l, double h) {
  Box3D b;
  b.center = {x, y, z};
  b.w = w;
  b.l = l;
  b.h = h;
  return b;
}

Box2D rect2d(double x_min, double y_min, double x_max, double y_max) {
  Box2D b;
  b.x_min = x_min;
  b.y_min = y_min;
  b.x_max = x_max;
  b.y_max = y_max;
  return b;
}

TextCatalog two_class_catalog() {
  TextCatalog catalog;
  catalog.entries.push_back({"car", FeatureVec{{1.0, 0.0}}});
  catalog.entries.push_back({"pedestrian", FeatureVec{{0.0, 1.0}}});
  return catalog;
}

}  // namespace

TEST_SUITE("semantics") {

TEST_CASE("project_box3d_to_image produces the corner envelope") {
  const Box3D box = box_at(10.0, 0.0, 0.0, 2.0, 2.0, 2.0);
  const auto rect = project_box3d_to_image(box, forward_camera(), test_intrinsics());
  REQUIRE(rect.has_value());
  // Near face at x = 9: u spans 800 -+ 800 * (1 / 9), v likewise around 450.
  CHECK(rect->x_min == doctest::Approx(800.0 - 800.0 / 9.0));
  CHECK(rect->x_max == doctest::Approx(800.0 + 800.0 / 9.0));
  CHECK(rect->y_min == doctest::Approx(450.0 - 800.0 / 9.0));
  CHECK(rect->y_max == doctest::Approx(450.0 + 800.0 / 9.0));
}

TEST_CASE("project_box3d_to_image clips to the image and drops invisible boxes") {
  // Behind the camera.
  CHECK(!project_box3d_to_image(box_at(-10.0, 0.0, 0.0, 2.0, 2.0, 2.0), forward_camera(),
                                test_intrinsics())
             .has_value());
  // Far off to the side: projects outside the image entirely.
  CHECK(!project_box3d_to_image(box_at(1.0, 50.0, 0.0, 1.0, 1.0, 1.0), forward_camera(),
                                test_intrinsics())
             .has_value());
  // Partially visible: the envelope is clipped to the image rectangle.
  const auto partial = project_box3d_to_image(box_at(5.0, 4.5, 0.0, 2.0, 2.0, 2.0),
                                              forward_camera(), test_intrinsics());
  REQUIRE(partial.has_value());
  CHECK(partial->x_min == doctest::Approx(0.0));
  CHECK(partial->x_max > 0.0);
}

TEST_CASE("nearest_2d_match picks the highest IoU and breaks ties low") {
  const Box2D probe = rect2d(10.0, 10.0, 20.0, 20.0);
  std::vector<Box2D> detections;
  detections.push_back(rect2d(15.0, 10.0, 25.0, 20.0));  // IoU 1/3
  detections.push_back(rect2d(11.0, 10.0, 21.0, 20.0));  // IoU 9/11
  detections.push_back(rect2d(100.0, 100.0, 110.0, 110.0));
  auto best = nearest_2d_match(probe, detections);
  REQUIRE(best.has_value());
  CHECK(*best == 1);

  // No overlap anywhere.
  std::vector<Box2D> far{rect2d(100.0, 100.0, 110.0, 110.0)};
  CHECK(!nearest_2d_match(probe, far).has_value());

  // Exact tie keeps the first.
  std::vector<Box2D> tie{rect2d(15.0, 10.0, 25.0, 20.0), rect2d(15.0, 10.0, 25.0, 20.0)};
  auto first = nearest_2d_match(probe, tie);
  REQUIRE(first.has_value());
  CHECK(*first == 0);
}

TEST_CASE("fuse_labels lets the stronger side win and the 3D side keep ties") {
  const TextCatalog catalog = two_class_catalog();
  const FeatureVec car_like{{0.9, 0.1}};
  const FeatureVec ped_like{{0.05, 0.95}};

  // 3D says car weakly, 2D says pedestrian strongly.
  const FusedLabel fused = fuse_labels(car_like, &ped_like, catalog);
  CHECK(fused.class_name == "pedestrian");
  CHECK(fused.provenance == Provenance::kFrom2D);

  // Without a 2D feature the 3D side decides.
  const FusedLabel alone = fuse_labels(car_like, nullptr, catalog);
  CHECK(alone.class_name == "car");
  CHECK(alone.provenance == Provenance::kFrom3D);
  CHECK(alone.confidence == doctest::Approx(0.9 / std::hypot(0.9, 0.1)));

  // Identical similarity on both sides: the 3D label stays.
  const FusedLabel tie = fuse_labels(car_like, &car_like, catalog);
  CHECK(tie.provenance == Provenance::kFrom3D);

  CHECK_THROWS_AS(fuse_labels(car_like, nullptr, TextCatalog{}), Error);
  const FeatureVec zero{{0.0, 0.0}};
  CHECK_THROWS_AS(fuse_labels(zero, nullptr, catalog), Error);
}

TEST_CASE("prior_recalibrate overrides weak labels with a strong size match") {
  const auto priors = builtin_size_priors();
  // Exactly truck-sized box, weakly labeled as car.
  const Box3D truck_box = box_at(20.0, 0.0, 1.0, 2.52, 6.94, 2.85);
  const FusedLabel weak{"car", 0.4, Provenance::kFrom3D};
  const LabeledBox out = prior_recalibrate(truck_box, weak, priors);
  CHECK(out.class_name == "truck");
  CHECK(out.provenance == Provenance::kFromPrior);
  CHECK(out.confidence == doctest::Approx(1.0));

  // A strong fused label survives: co-centered IoU can never exceed 1 and the
  // override requires strictly greater confidence.
  const FusedLabel strong{"car", 1.0, Provenance::kFrom2D};
  const LabeledBox kept = prior_recalibrate(truck_box, strong, priors);
  CHECK(kept.class_name == "car");
  CHECK(kept.provenance == Provenance::kFrom2D);
}

TEST_CASE("prior_recalibrate allows the footprint swap") {
  const auto priors = builtin_size_priors();
  // Barrier dimensions with w and l exchanged.
  const Box3D sideways = box_at(10.0, 0.0, 0.0, 0.50, 2.51, 0.99);
  const FusedLabel weak{"car", 0.1, Provenance::kFrom3D};
  const LabeledBox out = prior_recalibrate(sideways, weak, priors);
  CHECK(out.class_name == "barrier");
  CHECK(out.confidence == doctest::Approx(1.0));
}

TEST_CASE("label_frame labels every box and never drops one") {
  const TextCatalog catalog = two_class_catalog();
  const auto priors = builtin_size_priors();

  Frame frame;
  CameraModel cam;
  cam.camera_id = 0;
  cam.intrinsics = test_intrinsics();
  cam.lidar_to_camera = forward_camera();
  frame.cameras.push_back(cam);
  frame.detections2d.resize(1);

  // One box with a clean car feature, one with no feature at all.
  const std::vector<Box3D> boxes{box_at(10.0, 0.0, 0.0, 1.96, 4.63, 1.74),
                                 box_at(20.0, 5.0, 0.0, 0.67, 0.73, 1.77)};
  std::vector<std::optional<FeatureVec>> features(2);
  features[0] = FeatureVec{{1.0, 0.0}};

  const auto labeled = label_frame(boxes, features, frame, catalog, priors, LabelConfig{});
  REQUIRE(labeled.size() == 2);
  CHECK(labeled[0].class_name == "car");
  // The featureless pedestrian-sized box falls back to the prior table.
  CHECK(labeled[1].class_name == "pedestrian");
  CHECK(labeled[1].provenance == Provenance::kFromPrior);
}

TEST_CASE("label_frame without priors keeps the unknown fallback") {
  Frame frame;
  const std::vector<Box3D> boxes{box_at(10.0, 0.0, 0.0, 1.0, 1.0, 1.0)};
  const std::vector<std::optional<FeatureVec>> features{std::nullopt};
  LabelConfig cfg;
  cfg.use_priors = false;
  const auto labeled =
      label_frame(boxes, features, frame, TextCatalog{}, builtin_size_priors(), cfg);
  REQUIRE(labeled.size() == 1);
  CHECK(labeled[0].class_name == "unknown");
  CHECK(labeled[0].confidence == doctest::Approx(0.0));
}

}  // TEST_SUITE
