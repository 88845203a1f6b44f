#include "boxlift/geometry.hpp"

#include <algorithm>
#include <limits>

#include "boxlift/errors.hpp"

namespace boxlift {

namespace {

// Overlap length of two centered intervals; zero when disjoint.
double axis_overlap(double center_a, double extent_a, double center_b, double extent_b) {
  const double lo = std::max(center_a - 0.5 * extent_a, center_b - 0.5 * extent_b);
  const double hi = std::min(center_a + 0.5 * extent_a, center_b + 0.5 * extent_b);
  return std::max(0.0, hi - lo);
}

}  // namespace

Vec3 apply(const RigidTransform& t, const Vec3& p) {
  const auto& r = t.rotation;
  return {r[0] * p.x + r[1] * p.y + r[2] * p.z + t.translation.x,
          r[3] * p.x + r[4] * p.y + r[5] * p.z + t.translation.y,
          r[6] * p.x + r[7] * p.y + r[8] * p.z + t.translation.z};
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  RigidTransform out;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double sum = 0.0;
      for (int k = 0; k < 3; ++k) {
        sum += a.rotation[3 * i + k] * b.rotation[3 * k + j];
      }
      out.rotation[3 * i + j] = sum;
    }
  }
  out.translation = apply(a, b.translation);
  return out;
}

RigidTransform invert(const RigidTransform& t) {
  RigidTransform out;
  // Rotation inverse is the transpose; translation is -R^T * t.
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      out.rotation[3 * i + j] = t.rotation[3 * j + i];
    }
  }
  const Vec3 neg{-t.translation.x, -t.translation.y, -t.translation.z};
  const auto& r = out.rotation;
  out.translation = {r[0] * neg.x + r[1] * neg.y + r[2] * neg.z,
                     r[3] * neg.x + r[4] * neg.y + r[5] * neg.z,
                     r[6] * neg.x + r[7] * neg.y + r[8] * neg.z};
  return out;
}

double orthonormality_error(const RigidTransform& t) {
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double sum = 0.0;
      for (int k = 0; k < 3; ++k) {
        sum += t.rotation[3 * i + k] * t.rotation[3 * j + k];
      }
      const double expected = (i == j) ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(sum - expected));
    }
  }
  return worst;
}

bool contains(const Box3D& b, const Vec3& p) {
  return std::abs(p.x - b.center.x) <= 0.5 * b.l && std::abs(p.y - b.center.y) <= 0.5 * b.w &&
         std::abs(p.z - b.center.z) <= 0.5 * b.h;
}

std::array<Vec3, 8> corners(const Box3D& b) {
  std::array<Vec3, 8> out;
  int n = 0;
  for (const double sx : {-0.5, 0.5}) {
    for (const double sy : {-0.5, 0.5}) {
      for (const double sz : {-0.5, 0.5}) {
        out[n++] = {b.center.x + sx * b.l, b.center.y + sy * b.w, b.center.z + sz * b.h};
      }
    }
  }
  return out;
}

Box3D envelope(const Box3D& a, const Box3D& b) {
  const double x_min = std::min(a.center.x - 0.5 * a.l, b.center.x - 0.5 * b.l);
  const double x_max = std::max(a.center.x + 0.5 * a.l, b.center.x + 0.5 * b.l);
  const double y_min = std::min(a.center.y - 0.5 * a.w, b.center.y - 0.5 * b.w);
  const double y_max = std::max(a.center.y + 0.5 * a.w, b.center.y + 0.5 * b.w);
  const double z_min = std::min(a.center.z - 0.5 * a.h, b.center.z - 0.5 * b.h);
  const double z_max = std::max(a.center.z + 0.5 * a.h, b.center.z + 0.5 * b.h);
  Box3D out;
  out.center = {0.5 * (x_min + x_max), 0.5 * (y_min + y_max), 0.5 * (z_min + z_max)};
  out.l = x_max - x_min;
  out.w = y_max - y_min;
  out.h = z_max - z_min;
  out.score = std::max(a.score, b.score);
  out.class_id = a.class_id ? a.class_id : b.class_id;
  return out;
}

Box3D bounding_box(std::span<const Vec3> points) {
  if (points.empty()) {
    fail(ErrorCode::kEmptyInput, "bounding_box: no points");
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  Vec3 lo{kInf, kInf, kInf};
  Vec3 hi{-kInf, -kInf, -kInf};
  for (const Vec3& p : points) {
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    lo.z = std::min(lo.z, p.z);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
    hi.z = std::max(hi.z, p.z);
  }
  Box3D out;
  out.center = {0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y), 0.5 * (lo.z + hi.z)};
  out.l = hi.x - lo.x;
  out.w = hi.y - lo.y;
  out.h = hi.z - lo.z;
  return out;
}

double iou_3d(const Box3D& a, const Box3D& b) {
  const double ix = axis_overlap(a.center.x, a.l, b.center.x, b.l);
  const double iy = axis_overlap(a.center.y, a.w, b.center.y, b.w);
  const double iz = axis_overlap(a.center.z, a.h, b.center.z, b.h);
  const double inter = ix * iy * iz;
  const double uni = volume(a) + volume(b) - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

double iou_2d(const Box2D& a, const Box2D& b) {
  const double ix = std::max(0.0, std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min));
  const double iy = std::max(0.0, std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min));
  const double inter = ix * iy;
  const double area_a = (a.x_max - a.x_min) * (a.y_max - a.y_min);
  const double area_b = (b.x_max - b.x_min) * (b.y_max - b.y_min);
  const double uni = area_a + area_b - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

std::vector<ProjectedPoint> project_points(const PointCloud& cloud,
                                           const RigidTransform& lidar_to_camera,
                                           const CameraIntrinsics& cam,
                                           const std::vector<std::int32_t>* subset) {
  std::vector<ProjectedPoint> out;
  const auto project_one = [&](std::int32_t index) {
    const Vec3 pc = apply(lidar_to_camera, cloud.points[static_cast<std::size_t>(index)]);
    if (pc.z <= 0.0) {
      return;  // behind the camera plane, no finite pixel
    }
    const double u = cam.fx * (pc.x / pc.z) + cam.cx;
    const double v = cam.fy * (pc.y / pc.z) + cam.cy;
    if (u < 0.0 || u > static_cast<double>(cam.width) || v < 0.0 ||
        v > static_cast<double>(cam.height)) {
      return;
    }
    out.push_back({index, u, v});
  };
  if (subset == nullptr) {
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      project_one(static_cast<std::int32_t>(i));
    }
  } else {
    for (const std::int32_t i : *subset) {
      project_one(i);
    }
  }
  return out;
}

}  // namespace boxlift
