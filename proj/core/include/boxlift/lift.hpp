#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "boxlift/geometry.hpp"
#include "boxlift/ground.hpp"
#include "boxlift/scene.hpp"

namespace boxlift {

// A set of point indices into one frame's cloud, ascending.
struct Cluster {
  std::vector<std::int32_t> indices;

  std::size_t size() const { return indices.size(); }
};

struct LiftConfig {
  RansacConfig ransac;
  double ground_margin = 0.2;    // meters above the fitted plane to keep
  double cluster_epsilon = 0.5;  // neighborhood radius for region growing
  int min_cluster = 5;           // components smaller than this are dropped
  double min_extent = 0.1;       // degenerate box extents are inflated to this
};

// Points whose image projection falls inside the closed detection rectangle,
// intersected with the detection's instance mask when one is given. A
// non-null candidates list restricts the search (e.g. to ground-removed
// points).
Cluster frustum_points(const PointCloud& cloud, const Box2D& box, const SegMask* mask,
                       const RigidTransform& lidar_to_camera, const CameraIntrinsics& cam,
                       const std::vector<std::int32_t>* candidates = nullptr);

// Connected components of the epsilon-neighborhood graph over the seed
// points (edge iff distance <= epsilon). Components smaller than min_cluster
// are discarded. Output is ordered by each component's smallest point index,
// and indices within a component are ascending.
std::vector<Cluster> region_grow(const PointCloud& cloud, const Cluster& seeds, double epsilon,
                                 int min_cluster);

// The cluster with the most points; ties go to the one containing the
// smallest point index. Throws kEmptyInput on an empty list.
const Cluster& densest_cluster(const std::vector<Cluster>& clusters);

// Extremal axis-aligned box over the cluster's points. Zero extents (single
// point, axis-degenerate cluster) are inflated to min_extent around the
// midpoint. Throws kEmptyInput on an empty cluster.
Box3D estimate_box(const Cluster& cluster, const PointCloud& cloud, double min_extent);

// Provenance of one lifted box: which camera and which detection spawned it.
struct LiftedBox {
  Box3D box;
  std::int32_t camera_id = 0;
  std::int32_t detection_index = 0;
};

struct LiftResult {
  std::vector<LiftedBox> boxes;
  std::optional<GroundPlane> ground;  // unset when the plane fit failed
};

// Full per-frame lifting chain: ground removal once per frame, then per
// detection frustum selection, region growing, densest-cluster pick and box
// estimation. Detections whose frustum yields no usable cluster are skipped.
// A failed ground fit (too few points, no horizontal plane) degrades to
// lifting without ground removal rather than failing the frame.
LiftResult lift_frame_detailed(const Frame& frame, const LiftConfig& cfg);

// Same, boxes only. Output order follows (camera, detection) order.
std::vector<Box3D> lift_frame(const Frame& frame, const LiftConfig& cfg);

}  // namespace boxlift
