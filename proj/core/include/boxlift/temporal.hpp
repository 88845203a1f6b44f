#pragma once

#include <cstdint>
#include <vector>

#include "boxlift/geometry.hpp"

namespace boxlift {

struct TemporalConfig {
  double zero_iou_eps = 1e-6;  // below this a neighbor box counts as unmatched
  double far_distance = 30.0;  // meters; only boxes beyond this get merged
  double nms_iou = 0.5;
};

// Row-major N_neighbor x N_current matrix of 3D IoUs.
struct OverlapMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

// Carries a box from the source frame's LiDAR coordinates into the
// destination frame's, through the global frame. The rotated box is re-axis-
// aligned as the envelope of its eight transformed corners, so its volume
// never shrinks and is preserved exactly when the net rotation is identity.
Box3D project_box_between_frames(const Box3D& box, const EgoPose& src, const EgoPose& dst);

OverlapMatrix build_overlap_matrix(const std::vector<Box3D>& projected,
                                   const std::vector<Box3D>& current);

// Where each output box of temporal_update came from.
struct TemporalProvenance {
  enum class Kind { kOriginal, kMerged, kRecovered };
  Kind kind = Kind::kOriginal;
  std::int32_t current_index = -1;   // set for kOriginal and kMerged
  std::int32_t neighbor_index = -1;  // set for kMerged and kRecovered
};

struct TemporalResult {
  std::vector<Box3D> boxes;
  std::vector<TemporalProvenance> provenance;  // parallel to boxes
};

// One-sided refinement of the current frame against a neighbor frame.
// Neighbor boxes are projected into the current frame; a projected box with
// no overlap among current boxes is appended as a recovered detection, and
// one that overlaps while sitting beyond cfg.far_distance replaces its best
// match with the envelope of the pair. Duplicates introduced by merging are
// suppressed at cfg.nms_iou, keeping the higher score. Output keeps current
// boxes first in their original order, recovered boxes after in neighbor
// order.
TemporalResult temporal_update_detailed(const std::vector<Box3D>& current,
                                        const std::vector<Box3D>& neighbor,
                                        const EgoPose& current_pose, const EgoPose& neighbor_pose,
                                        const TemporalConfig& cfg);

std::vector<Box3D> temporal_update(const std::vector<Box3D>& current,
                                   const std::vector<Box3D>& neighbor, const EgoPose& current_pose,
                                   const EgoPose& neighbor_pose, const TemporalConfig& cfg);

// Primary origin of a box after both passes: the current frame's own list or
// one of the neighbors. Merged boxes keep their current-side parent as
// primary, so downstream per-box data (features) can follow the box.
struct BoxSource {
  enum class Origin { kCurrent, kPrev, kNext };
  Origin origin = Origin::kCurrent;
  std::int32_t index = -1;
};

struct BidirectionalResult {
  std::vector<Box3D> boxes;
  std::vector<BoxSource> sources;  // parallel to boxes
};

// Applies the update with the next frame first, then with the previous frame
// on the running result. Null neighbors are skipped.
BidirectionalResult temporal_update_bidirectional(const std::vector<Box3D>& current,
                                                  const std::vector<Box3D>* prev,
                                                  const std::vector<Box3D>* next,
                                                  const EgoPose& current_pose,
                                                  const EgoPose* prev_pose,
                                                  const EgoPose* next_pose,
                                                  const TemporalConfig& cfg);

}  // namespace boxlift
