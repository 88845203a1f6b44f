#include "boxlift/lift.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "boxlift/errors.hpp"

namespace boxlift {

namespace {

// Spatial hash over epsilon-sized cells; region growing then only scans the
// 27 neighboring cells per point instead of the whole seed set.
struct CellHash {
  std::size_t operator()(const std::array<std::int64_t, 3>& c) const {
    std::size_t h = 1469598103934665603ull;
    for (const std::int64_t v : c) {
      h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

std::array<std::int64_t, 3> cell_of(const Vec3& p, double epsilon) {
  return {static_cast<std::int64_t>(std::floor(p.x / epsilon)),
          static_cast<std::int64_t>(std::floor(p.y / epsilon)),
          static_cast<std::int64_t>(std::floor(p.z / epsilon))};
}

}  // namespace

Cluster frustum_points(const PointCloud& cloud, const Box2D& box, const SegMask* mask,
                       const RigidTransform& lidar_to_camera, const CameraIntrinsics& cam,
                       const std::vector<std::int32_t>* candidates) {
  Cluster out;
  for (const ProjectedPoint& pp : project_points(cloud, lidar_to_camera, cam, candidates)) {
    if (pp.u < box.x_min || pp.u > box.x_max || pp.v < box.y_min || pp.v > box.y_max) {
      continue;
    }
    if (mask != nullptr && !mask->at(pp.u, pp.v)) {
      continue;
    }
    out.indices.push_back(pp.index);
  }
  std::sort(out.indices.begin(), out.indices.end());
  return out;
}

std::vector<Cluster> region_grow(const PointCloud& cloud, const Cluster& seeds, double epsilon,
                                 int min_cluster) {
  std::vector<Cluster> out;
  if (seeds.indices.empty()) {
    return out;
  }

  std::unordered_map<std::array<std::int64_t, 3>, std::vector<std::int32_t>, CellHash> grid;
  for (const std::int32_t idx : seeds.indices) {
    grid[cell_of(cloud.points[static_cast<std::size_t>(idx)], epsilon)].push_back(idx);
  }

  const double eps2 = epsilon * epsilon;
  std::vector<std::uint8_t> visited(cloud.size(), 0);

  // Seeds are ascending, so components come out ordered by smallest member.
  for (const std::int32_t start : seeds.indices) {
    if (visited[static_cast<std::size_t>(start)]) {
      continue;
    }
    Cluster component;
    std::vector<std::int32_t> frontier{start};
    visited[static_cast<std::size_t>(start)] = 1;
    while (!frontier.empty()) {
      const std::int32_t cur = frontier.back();
      frontier.pop_back();
      component.indices.push_back(cur);
      const Vec3& p = cloud.points[static_cast<std::size_t>(cur)];
      const auto base = cell_of(p, epsilon);
      for (std::int64_t dx = -1; dx <= 1; ++dx) {
        for (std::int64_t dy = -1; dy <= 1; ++dy) {
          for (std::int64_t dz = -1; dz <= 1; ++dz) {
            const auto it = grid.find({base[0] + dx, base[1] + dy, base[2] + dz});
            if (it == grid.end()) {
              continue;
            }
            for (const std::int32_t nb : it->second) {
              if (visited[static_cast<std::size_t>(nb)]) {
                continue;
              }
              if (squared_norm(cloud.points[static_cast<std::size_t>(nb)] - p) <= eps2) {
                visited[static_cast<std::size_t>(nb)] = 1;
                frontier.push_back(nb);
              }
            }
          }
        }
      }
    }
    if (static_cast<int>(component.indices.size()) >= min_cluster) {
      std::sort(component.indices.begin(), component.indices.end());
      out.push_back(std::move(component));
    }
  }
  return out;
}

const Cluster& densest_cluster(const std::vector<Cluster>& clusters) {
  if (clusters.empty()) {
    fail(ErrorCode::kEmptyInput, "densest_cluster: no clusters");
  }
  const Cluster* best = &clusters.front();
  for (const Cluster& c : clusters) {
    if (c.size() > best->size() ||
        (c.size() == best->size() && c.indices.front() < best->indices.front())) {
      best = &c;
    }
  }
  return *best;
}

Box3D estimate_box(const Cluster& cluster, const PointCloud& cloud, double min_extent) {
  if (cluster.indices.empty()) {
    fail(ErrorCode::kEmptyInput, "estimate_box: empty cluster");
  }
  std::vector<Vec3> pts;
  pts.reserve(cluster.size());
  for (const std::int32_t idx : cluster.indices) {
    pts.push_back(cloud.points[static_cast<std::size_t>(idx)]);
  }
  Box3D box = bounding_box(pts);
  if (box.l == 0.0) box.l = min_extent;
  if (box.w == 0.0) box.w = min_extent;
  if (box.h == 0.0) box.h = min_extent;
  return box;
}

LiftResult lift_frame_detailed(const Frame& frame, const LiftConfig& cfg) {
  LiftResult result;

  // A frame that is too sparse or has no horizontal plane still gets lifted,
  // just without ground removal; calibration problems surface per camera.
  std::vector<std::int32_t> above_ground;
  const std::vector<std::int32_t>* candidates = nullptr;
  try {
    const GroundPlane plane = fit_ground_plane(frame.points, cfg.ransac);
    above_ground = remove_ground(frame.points, plane, cfg.ground_margin);
    candidates = &above_ground;
    result.ground = plane;
  } catch (const Error&) {
  }

  for (std::size_t cam_idx = 0; cam_idx < frame.cameras.size(); ++cam_idx) {
    const CameraModel& cam = frame.cameras[cam_idx];
    if (cam_idx >= frame.detections2d.size()) {
      break;
    }
    const std::vector<Box2D>& dets = frame.detections2d[cam_idx];
    for (std::size_t det_idx = 0; det_idx < dets.size(); ++det_idx) {
      const SegMask* mask = frame.find_mask(cam.camera_id, static_cast<std::int32_t>(det_idx));
      const Cluster frustum = frustum_points(frame.points, dets[det_idx], mask,
                                             cam.lidar_to_camera, cam.intrinsics, candidates);
      const std::vector<Cluster> clusters =
          region_grow(frame.points, frustum, cfg.cluster_epsilon, cfg.min_cluster);
      if (clusters.empty()) {
        continue;  // nothing usable behind this detection
      }
      Box3D box = estimate_box(densest_cluster(clusters), frame.points, cfg.min_extent);
      box.score = dets[det_idx].score;
      box.class_id = dets[det_idx].class_id;
      result.boxes.push_back(
          {box, cam.camera_id, static_cast<std::int32_t>(det_idx)});
    }
  }
  return result;
}

std::vector<Box3D> lift_frame(const Frame& frame, const LiftConfig& cfg) {
  std::vector<Box3D> out;
  for (const LiftedBox& lb : lift_frame_detailed(frame, cfg).boxes) {
    out.push_back(lb.box);
  }
  return out;
}

}  // namespace boxlift
