#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "boxlift/feature.hpp"
#include "boxlift/geometry.hpp"
#include "boxlift/labels.hpp"
#include "boxlift/priors.hpp"
#include "boxlift/scene.hpp"

namespace boxlift {

struct LabelConfig {
  bool use_2d = true;      // fuse with matched 2D detection features
  bool use_priors = true;  // allow size priors to overrule weak labels
};

// Pixel-space envelope of the box's eight corners, clipped to the image.
// Corners behind the camera are ignored; returns nullopt when no corner is in
// front or the clipped envelope is empty.
std::optional<Box2D> project_box3d_to_image(const Box3D& box,
                                            const RigidTransform& lidar_to_camera,
                                            const CameraIntrinsics& cam);

// Index of the detection with the highest 2D IoU against the projected box;
// nullopt when nothing overlaps. Ties pick the lowest index.
std::optional<std::size_t> nearest_2d_match(const Box2D& projected,
                                            std::span<const Box2D> detections);

struct FusedLabel {
  std::string class_name;
  double confidence = 0.0;
  Provenance provenance = Provenance::kFrom3D;
};

// Classifies a feature against the catalog by cosine similarity. When a 2D
// feature is given too, both are scored and the stronger side wins (the 3D
// side on an exact tie). Throws kZeroVector on zero-norm inputs or catalog
// entries, kEmptyInput on an empty catalog.
FusedLabel fuse_labels(const FeatureVec& f3d, const FeatureVec* f2d, const TextCatalog& catalog);

// Compares the fused label's confidence against the best co-centered IoU
// between the box and a prior-sized box (footprint swap allowed). When the
// prior IoU is higher, the prior's class takes over and the box is marked
// kFromPrior.
LabeledBox prior_recalibrate(const Box3D& box, const FusedLabel& fused,
                             std::span<const SizePrior> priors);

// Labels every box of one frame: project into each camera, match 2D
// detections, fuse features, recalibrate against priors. features is parallel
// to boxes; a box without a feature (nullopt) falls back to the prior-only
// path. No box is ever dropped.
std::vector<LabeledBox> label_frame(const std::vector<Box3D>& boxes,
                                    const std::vector<std::optional<FeatureVec>>& features,
                                    const Frame& frame, const TextCatalog& catalog,
                                    std::span<const SizePrior> priors, const LabelConfig& cfg);

}  // namespace boxlift
