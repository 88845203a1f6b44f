#include "boxlift/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "boxlift/errors.hpp"

namespace boxlift {

namespace {

constexpr double kRotationTolerance = 1e-9;

void check(bool ok, const std::string& what) {
  if (!ok) {
    fail(ErrorCode::kSchema, "validate_scene: " + what);
  }
}

void check_rotation(const RigidTransform& t, const std::string& what) {
  check(orthonormality_error(t) <= kRotationTolerance, what + " rotation not orthonormal");
}

}  // namespace

bool SegMask::at(double u, double v) const {
  if (width <= 0 || height <= 0) {
    return false;
  }
  const auto col = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(u)), 0,
                                            static_cast<std::int64_t>(width) - 1);
  const auto row = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(v)), 0,
                                            static_cast<std::int64_t>(height) - 1);
  return bitmap[static_cast<std::size_t>(row * width + col)] != 0;
}

const SegMask* Frame::find_mask(std::int32_t camera_id, std::int32_t box_index) const {
  for (const SegMask& m : masks) {
    if (m.camera_id == camera_id && m.box_index == box_index) {
      return &m;
    }
  }
  return nullptr;
}

void validate_scene(const Scene& scene) {
  std::size_t feature_dim = 0;
  for (const auto& entry : scene.catalog.entries) {
    check(!entry.name.empty(), "catalog entry with empty name");
    if (feature_dim == 0) {
      feature_dim = entry.embedding.dim();
    }
    check(entry.embedding.dim() == feature_dim, "catalog dims disagree");
  }
  for (const SizePrior& p : scene.priors) {
    check(p.w > 0.0 && p.l > 0.0 && p.h > 0.0, "nonpositive prior dimension");
  }

  double prev_ts = -std::numeric_limits<double>::infinity();
  for (const Frame& frame : scene.frames) {
    const std::string where = "frame " + std::to_string(frame.frame_id) + ": ";
    check(frame.timestamp > prev_ts, where + "timestamps not strictly increasing");
    prev_ts = frame.timestamp;

    check_rotation(frame.ego_pose.ego_to_global, where + "ego_to_global");
    check_rotation(frame.ego_pose.lidar_to_ego, where + "lidar_to_ego");

    check(frame.detections2d.size() == frame.cameras.size(),
          where + "detections2d not parallel to cameras");

    for (const CameraModel& cam : frame.cameras) {
      check(cam.intrinsics.width > 0 && cam.intrinsics.height > 0,
            where + "nonpositive image size");
      check(cam.intrinsics.fx > 0.0 && cam.intrinsics.fy > 0.0,
            where + "nonpositive focal length");
      check_rotation(cam.lidar_to_camera, where + "lidar_to_camera");
    }

    for (std::size_t c = 0; c < frame.detections2d.size(); ++c) {
      for (const Box2D& det : frame.detections2d[c]) {
        check(det.x_min < det.x_max && det.y_min < det.y_max, where + "degenerate 2D box");
        check(det.score >= 0.0 && det.score <= 1.0, where + "2D score out of range");
        if (det.feature_id) {
          check(*det.feature_id >= 0 &&
                    static_cast<std::size_t>(*det.feature_id) < frame.features2d.size(),
                where + "dangling feature_id");
        }
      }
    }

    for (const FeatureVec& f : frame.features2d) {
      if (feature_dim == 0) {
        feature_dim = f.dim();
      }
      check(f.dim() == feature_dim, where + "feature dims disagree");
    }

    for (const SegMask& m : frame.masks) {
      const auto cam = std::find_if(frame.cameras.begin(), frame.cameras.end(),
                                    [&m](const CameraModel& c) { return c.camera_id == m.camera_id; });
      check(cam != frame.cameras.end(), where + "mask for unknown camera");
      check(m.width == cam->intrinsics.width && m.height == cam->intrinsics.height,
            where + "mask resolution mismatch");
      check(m.bitmap.size() == static_cast<std::size_t>(m.width) * static_cast<std::size_t>(m.height),
            where + "mask bitmap size mismatch");
      const std::size_t cam_pos = static_cast<std::size_t>(cam - frame.cameras.begin());
      check(m.box_index >= 0 &&
                static_cast<std::size_t>(m.box_index) < frame.detections2d[cam_pos].size(),
            where + "mask for unknown detection");
    }

    for (const LabeledBox& gt : frame.gt_boxes) {
      check(!gt.class_name.empty(), where + "ground truth without class");
      check(gt.box.w > 0.0 && gt.box.l > 0.0 && gt.box.h > 0.0, where + "degenerate GT box");
      check(gt.confidence >= 0.0 && gt.confidence <= 1.0, where + "GT confidence out of range");
    }
  }
}

}  // namespace boxlift
