#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "boxlift/feature.hpp"
#include "boxlift/geometry.hpp"
#include "boxlift/labels.hpp"
#include "boxlift/priors.hpp"

namespace boxlift {

// Instance mask for one 2D detection, full image resolution, row-major.
// Keyed by (camera_id, box_index) into the frame's detection lists.
struct SegMask {
  std::int32_t camera_id = 0;
  std::int32_t box_index = 0;
  std::int32_t width = 0;
  std::int32_t height = 0;
  std::vector<std::uint8_t> bitmap;  // width * height entries, 0 or 1

  // Pixel lookup for a projected point. u and v may sit on the closed image
  // border, so they are floored and clamped into the bitmap.
  bool at(double u, double v) const;
};

struct CameraModel {
  std::int32_t camera_id = 0;
  CameraIntrinsics intrinsics;
  RigidTransform lidar_to_camera;
};

// One LiDAR sweep with its calibration, per-camera 2D detections, optional
// masks and optional ground truth. detections2d is parallel to cameras;
// feature_id on a detection indexes features2d.
struct Frame {
  std::int64_t frame_id = 0;
  double timestamp = 0.0;
  EgoPose ego_pose;
  std::vector<CameraModel> cameras;
  PointCloud points;
  std::vector<std::vector<Box2D>> detections2d;
  std::vector<FeatureVec> features2d;
  std::vector<SegMask> masks;
  std::vector<LabeledBox> gt_boxes;

  const SegMask* find_mask(std::int32_t camera_id, std::int32_t box_index) const;
};

struct Scene {
  std::string scene_id;
  std::vector<Frame> frames;
  TextCatalog catalog;
  std::vector<SizePrior> priors;
};

// Structural checks shared by the loader and the synthesizer: box ordering,
// score ranges, strictly increasing timestamps, orthonormal rotations,
// resolvable feature and mask references. Throws kSchema on violation.
void validate_scene(const Scene& scene);

}  // namespace boxlift
