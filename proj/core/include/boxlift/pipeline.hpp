#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "boxlift/lift.hpp"
#include "boxlift/metrics.hpp"
#include "boxlift/semantics.hpp"
#include "boxlift/spatial.hpp"
#include "boxlift/temporal.hpp"

namespace boxlift {

struct PipelineConfig {
  LiftConfig lift;
  // Cross-camera duplicate suppression right after lifting; one object seen
  // by two cameras otherwise yields two boxes.
  double lift_nms_iou = 0.5;

  bool temporal_enabled = true;
  TemporalConfig temporal;

  // Off by default: placed objects are training-side augmentation, they are
  // reported but never labeled or evaluated as detections.
  bool spatial_enabled = false;
  SpatialConfig spatial;

  LabelConfig label;
  EvalConfig eval;

  std::uint64_t seed = 0;  // base seed; per-frame streams derive from it
  int threads = 1;
};

struct FrameOutput {
  std::int64_t frame_id = 0;
  std::vector<Box3D> lifted;        // after cross-camera suppression
  std::vector<Box3D> refined;       // after temporal refinement
  std::vector<PlacedObject> placed; // spatial augmentation, when enabled
  std::vector<LabeledBox> labeled;  // final pseudo labels
};

struct PipelineResult {
  std::vector<FrameOutput> frames;
  std::optional<EvalReport> report;  // present when the scene has ground truth
};

// Full pseudo-labeling chain over a scene: lift each frame, refine against
// both temporal neighbors, optionally paste bank objects, attach class labels
// and score against ground truth when available. Frames are processed
// independently (cfg.threads > 1 fans them out); per-frame seeding keeps the
// output byte-identical for any thread count.
PipelineResult run_pipeline(const Scene& scene, const PipelineConfig& cfg);

}  // namespace boxlift
