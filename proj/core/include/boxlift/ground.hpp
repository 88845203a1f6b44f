#pragma once

#include <cstdint>
#include <vector>

#include "boxlift/geometry.hpp"

namespace boxlift {

struct RansacConfig {
  int iterations = 256;
  double inlier_threshold = 0.1;  // meters, point-to-plane
  double max_tilt_deg = 15.0;     // reject planes steeper than this off vertical
  std::uint64_t seed = 0;
};

// Plane normal . p + offset = 0 with unit normal and normal.z > 0, so
// signed_height() is positive above ground.
struct GroundPlane {
  Vec3 normal{0.0, 0.0, 1.0};
  double offset = 0.0;
};

inline double signed_height(const GroundPlane& g, const Vec3& p) {
  return dot(g.normal, p) + g.offset;
}

// RANSAC over 3-point samples, best candidate by inlier count, refined by a
// least-squares fit on its inliers. Throws kInsufficientPoints below 3 points
// and kNoHorizontalPlane when the refined normal exceeds max_tilt_deg.
GroundPlane fit_ground_plane(const PointCloud& cloud, const RansacConfig& cfg);

// Indices of points strictly higher than margin above the plane. The result
// is an index view into the original cloud, ascending.
std::vector<std::int32_t> remove_ground(const PointCloud& cloud, const GroundPlane& plane,
                                        double margin);

}  // namespace boxlift
