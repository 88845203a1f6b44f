#include "boxlift/semantics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "boxlift/errors.hpp"

namespace boxlift {

std::optional<Box2D> project_box3d_to_image(const Box3D& box,
                                            const RigidTransform& lidar_to_camera,
                                            const CameraIntrinsics& cam) {
  double u_min = std::numeric_limits<double>::infinity();
  double u_max = -u_min;
  double v_min = u_min;
  double v_max = -u_min;
  bool any_front = false;
  for (const Vec3& corner : corners(box)) {
    const Vec3 pc = apply(lidar_to_camera, corner);
    if (pc.z <= 0.0) {
      continue;  // corners behind the camera don't bound the envelope
    }
    any_front = true;
    const double u = cam.fx * (pc.x / pc.z) + cam.cx;
    const double v = cam.fy * (pc.y / pc.z) + cam.cy;
    u_min = std::min(u_min, u);
    u_max = std::max(u_max, u);
    v_min = std::min(v_min, v);
    v_max = std::max(v_max, v);
  }
  if (!any_front) {
    return std::nullopt;
  }
  Box2D out;
  out.x_min = std::max(u_min, 0.0);
  out.y_min = std::max(v_min, 0.0);
  out.x_max = std::min(u_max, static_cast<double>(cam.width));
  out.y_max = std::min(v_max, static_cast<double>(cam.height));
  out.score = box.score;
  if (out.x_min >= out.x_max || out.y_min >= out.y_max) {
    return std::nullopt;  // clipped away entirely
  }
  return out;
}

std::optional<std::size_t> nearest_2d_match(const Box2D& projected,
                                            std::span<const Box2D> detections) {
  std::optional<std::size_t> best;
  double best_iou = 0.0;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const double iou = iou_2d(projected, detections[i]);
    if (iou > best_iou) {
      best_iou = iou;
      best = i;
    }
  }
  return best;
}

FusedLabel fuse_labels(const FeatureVec& f3d, const FeatureVec* f2d, const TextCatalog& catalog) {
  if (catalog.entries.empty()) {
    fail(ErrorCode::kEmptyInput, "fuse_labels: empty catalog");
  }
  const auto classify = [&catalog](const FeatureVec& f) {
    std::size_t best = 0;
    double best_sim = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < catalog.entries.size(); ++i) {
      const double sim = cosine_similarity(f, catalog.entries[i].embedding);
      if (sim > best_sim) {
        best_sim = sim;
        best = i;
      }
    }
    return std::pair<std::size_t, double>{best, best_sim};
  };

  const auto [idx3, sim3] = classify(f3d);
  FusedLabel out{catalog.entries[idx3].name, sim3, Provenance::kFrom3D};
  if (f2d != nullptr) {
    const auto [idx2, sim2] = classify(*f2d);
    if (sim2 > sim3) {
      out = {catalog.entries[idx2].name, sim2, Provenance::kFrom2D};
    }
  }
  return out;
}

LabeledBox prior_recalibrate(const Box3D& box, const FusedLabel& fused,
                             std::span<const SizePrior> priors) {
  // Best prior by IoU against a prior-sized box sharing this center. Both
  // footprint orders count, mirroring the gate's swap symmetry.
  double best_iou = 0.0;
  const SizePrior* best = nullptr;
  for (const SizePrior& p : priors) {
    Box3D prior_box;
    prior_box.center = box.center;
    prior_box.w = p.w;
    prior_box.l = p.l;
    prior_box.h = p.h;
    double iou = iou_3d(box, prior_box);
    std::swap(prior_box.w, prior_box.l);
    iou = std::max(iou, iou_3d(box, prior_box));
    if (iou > best_iou) {
      best_iou = iou;
      best = &p;
    }
  }

  LabeledBox out;
  out.box = box;
  if (best != nullptr && best_iou > fused.confidence) {
    out.class_name = best->class_name;
    out.confidence = best_iou;
    out.provenance = Provenance::kFromPrior;
  } else {
    out.class_name = fused.class_name;
    out.confidence = fused.confidence;
    out.provenance = fused.provenance;
  }
  return out;
}

std::vector<LabeledBox> label_frame(const std::vector<Box3D>& boxes,
                                    const std::vector<std::optional<FeatureVec>>& features,
                                    const Frame& frame, const TextCatalog& catalog,
                                    std::span<const SizePrior> priors, const LabelConfig& cfg) {
  if (features.size() != boxes.size()) {
    fail(ErrorCode::kShapeMismatch, "label_frame: features not parallel to boxes");
  }
  std::vector<LabeledBox> out;
  out.reserve(boxes.size());
  for (std::size_t b = 0; b < boxes.size(); ++b) {
    const Box3D& box = boxes[b];

    // Strongest 2D counterpart across all cameras, by projected IoU.
    const FeatureVec* f2d = nullptr;
    double f2d_iou = 0.0;
    if (cfg.use_2d) {
      for (std::size_t c = 0; c < frame.cameras.size() && c < frame.detections2d.size(); ++c) {
        const std::optional<Box2D> proj = project_box3d_to_image(
            box, frame.cameras[c].lidar_to_camera, frame.cameras[c].intrinsics);
        if (!proj) {
          continue;
        }
        const std::vector<Box2D>& dets = frame.detections2d[c];
        const std::optional<std::size_t> match = nearest_2d_match(*proj, dets);
        if (!match) {
          continue;
        }
        const double iou = iou_2d(*proj, dets[*match]);
        const std::optional<std::int32_t> feature_id = dets[*match].feature_id;
        if (iou > f2d_iou && feature_id &&
            static_cast<std::size_t>(*feature_id) < frame.features2d.size()) {
          f2d_iou = iou;
          f2d = &frame.features2d[static_cast<std::size_t>(*feature_id)];
        }
      }
    }

    LabeledBox labeled;
    if (features[b].has_value()) {
      const FusedLabel fused = fuse_labels(*features[b], f2d, catalog);
      labeled = cfg.use_priors ? prior_recalibrate(box, fused, priors)
                               : LabeledBox{box, fused.class_name, fused.confidence,
                                            fused.provenance};
    } else {
      // No feature at all: the box can only be named by its shape.
      const FusedLabel fallback{"unknown", 0.0, Provenance::kFromPrior};
      labeled = cfg.use_priors ? prior_recalibrate(box, fallback, priors)
                               : LabeledBox{box, fallback.class_name, fallback.confidence,
                                            fallback.provenance};
    }
    out.push_back(std::move(labeled));
  }
  return out;
}

}  // namespace boxlift
