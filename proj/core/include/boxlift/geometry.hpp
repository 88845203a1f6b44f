#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace boxlift {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double squared_norm(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

// Range in the ground plane, ignoring z. Distances between boxes and from the
// ego are horizontal throughout the pipeline.
inline double horizontal_range(const Vec3& p) { return std::hypot(p.x, p.y); }

// Rigid motion p -> R*p + t. The rotation is row-major; callers that load
// transforms from disk validate orthonormality there, everything downstream
// assumes it holds.
struct RigidTransform {
  std::array<double, 9> rotation = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  Vec3 translation;
};

Vec3 apply(const RigidTransform& t, const Vec3& p);

// compose(a, b) applies b first: compose(a, b)(p) == a(b(p)).
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);
RigidTransform invert(const RigidTransform& t);

// Max absolute deviation of R*R^T from identity; used by loaders to validate.
double orthonormality_error(const RigidTransform& t);

// Pinhole camera. Image coordinates are u = fx * (x_c / z_c) + cx and
// v = fy * (y_c / z_c) + cy with the camera looking down +z.
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;
};

// Pixel-space detection rectangle. class_id and feature_id index per-frame
// tables when present; detections straight out of an open-vocabulary detector
// are class-agnostic and carry only a feature.
struct Box2D {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;
  double score = 1.0;
  std::optional<std::int32_t> class_id;
  std::optional<std::int32_t> feature_id;
};

// Axis-aligned 3D box. l spans x, w spans y, h spans z; yaw is fixed at zero
// by design, so there is no heading field.
struct Box3D {
  Vec3 center;
  double w = 0.0;
  double l = 0.0;
  double h = 0.0;
  double score = 1.0;
  std::optional<std::int32_t> class_id;
};

inline double volume(const Box3D& b) { return b.w * b.l * b.h; }

bool contains(const Box3D& b, const Vec3& p);  // closed box

std::array<Vec3, 8> corners(const Box3D& b);

// Smallest axis-aligned box covering both inputs. score is the larger of the
// two, class_id comes from a, falling back to b.
Box3D envelope(const Box3D& a, const Box3D& b);

// Smallest axis-aligned box covering a set of points (extents may be zero).
Box3D bounding_box(std::span<const Vec3> points);

double iou_3d(const Box3D& a, const Box3D& b);
double iou_2d(const Box2D& a, const Box2D& b);

struct PointCloud {
  std::vector<Vec3> points;

  std::size_t size() const { return points.size(); }
};

struct ProjectedPoint {
  std::int32_t index = 0;  // index into the source cloud
  double u = 0.0;
  double v = 0.0;
};

// Projects cloud points into an image. Keeps only points in front of the
// camera (z_c > 0) whose pixel lands inside the closed image rectangle
// [0, width] x [0, height]. A non-null subset restricts which indices are
// considered (possibly none); reported indices always refer to the full
// cloud.
std::vector<ProjectedPoint> project_points(const PointCloud& cloud,
                                           const RigidTransform& lidar_to_camera,
                                           const CameraIntrinsics& cam,
                                           const std::vector<std::int32_t>* subset = nullptr);

// Ego vehicle pose at one timestamp. ego_to_global places the ego in the map
// frame, lidar_to_ego mounts the sensor on the vehicle.
struct EgoPose {
  double timestamp = 0.0;
  RigidTransform ego_to_global;
  RigidTransform lidar_to_ego;
};

}  // namespace boxlift
