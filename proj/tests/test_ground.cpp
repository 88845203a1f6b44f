#include <doctest.h>

#include <cmath>

#include "boxlift/errors.hpp"
#include "boxlift/ground.hpp"
#include "oracles.hpp"

using namespace boxlift;

namespace {

// Flat plane z = z0 with Gaussian noise plus optional off-plane clutter.
PointCloud planted_ground(double z0, double noise_sigma, int n_ground, int n_clutter,
                          std::uint64_t seed) {
  test::XorShift64 rng(seed);
  const auto gauss = [&rng] {
    // Box-Muller, one value per call.
    const double u1 = std::max(rng.uniform(), 1e-12);
    const double u2 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  };
  PointCloud cloud;
  for (int i = 0; i < n_ground; ++i) {
    cloud.points.push_back({40.0 * (rng.uniform() - 0.5), 40.0 * (rng.uniform() - 0.5),
                            z0 + noise_sigma * gauss()});
  }
  for (int i = 0; i < n_clutter; ++i) {
    cloud.points.push_back({10.0 * (rng.uniform() - 0.5), 10.0 * (rng.uniform() - 0.5),
                            z0 + 0.5 + 2.0 * rng.uniform()});
  }
  return cloud;
}

}  // namespace

TEST_SUITE("ground") {

TEST_CASE("recovers a noiseless plane exactly") {
  const PointCloud cloud = planted_ground(-1.8, 0.0, 500, 0, 3);
  RansacConfig cfg;
  const GroundPlane plane = fit_ground_plane(cloud, cfg);
  CHECK(plane.normal.z > 0.0);
  CHECK(std::abs(plane.normal.x) < 1e-9);
  CHECK(std::abs(plane.normal.y) < 1e-9);
  CHECK(plane.offset == doctest::Approx(1.8).epsilon(1e-9));
}

TEST_CASE("normal is canonicalized to point up") {
  const PointCloud cloud = planted_ground(0.0, 0.01, 400, 100, 5);
  const GroundPlane plane = fit_ground_plane(cloud, RansacConfig{});
  CHECK(plane.normal.z > 0.0);
  CHECK(norm(plane.normal) == doctest::Approx(1.0));
}

TEST_CASE("noisy plane with clutter is recovered within tolerance") {
  const PointCloud cloud = planted_ground(-1.8, 0.02, 700, 300, 11);
  const GroundPlane plane = fit_ground_plane(cloud, RansacConfig{});
  const double tilt = std::acos(std::min(1.0, plane.normal.z)) * 180.0 / 3.14159265358979323846;
  CHECK(tilt < 1.0);
  CHECK(std::abs(plane.offset - 1.8) < 0.05);
}

TEST_CASE("steep plane is rejected") {
  // 45 degree plane: z = x.
  test::XorShift64 rng(17);
  PointCloud cloud;
  for (int i = 0; i < 300; ++i) {
    const double x = 20.0 * (rng.uniform() - 0.5);
    const double y = 20.0 * (rng.uniform() - 0.5);
    cloud.points.push_back({x, y, x});
  }
  CHECK_THROWS_AS(fit_ground_plane(cloud, RansacConfig{}), Error);
  try {
    fit_ground_plane(cloud, RansacConfig{});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNoHorizontalPlane);
  }
}

TEST_CASE("too few points") {
  PointCloud cloud;
  cloud.points.push_back({0.0, 0.0, 0.0});
  cloud.points.push_back({1.0, 0.0, 0.0});
  CHECK_THROWS_AS(fit_ground_plane(cloud, RansacConfig{}), Error);
}

TEST_CASE("signed_height and remove_ground keep strictly-above points") {
  GroundPlane plane;  // z = 0, normal up
  plane.normal = {0.0, 0.0, 1.0};
  plane.offset = 0.0;
  CHECK(signed_height(plane, {0.0, 0.0, 2.5}) == doctest::Approx(2.5));
  CHECK(signed_height(plane, {0.0, 0.0, -1.0}) == doctest::Approx(-1.0));

  PointCloud cloud;
  cloud.points.push_back({0.0, 0.0, 0.0});   // on plane
  cloud.points.push_back({0.0, 0.0, 0.2});   // exactly at margin, excluded
  cloud.points.push_back({0.0, 0.0, 0.21});  // kept
  cloud.points.push_back({0.0, 0.0, 5.0});   // kept
  const auto kept = remove_ground(cloud, plane, 0.2);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0] == 2);
  CHECK(kept[1] == 3);
}

TEST_CASE("same seed gives the same plane") {
  const PointCloud cloud = planted_ground(-1.5, 0.02, 600, 200, 23);
  RansacConfig cfg;
  cfg.seed = 99;
  const GroundPlane a = fit_ground_plane(cloud, cfg);
  const GroundPlane b = fit_ground_plane(cloud, cfg);
  CHECK(a.normal.x == b.normal.x);
  CHECK(a.normal.y == b.normal.y);
  CHECK(a.normal.z == b.normal.z);
  CHECK(a.offset == b.offset);
}

}  // TEST_SUITE
