#include "boxlift/pipeline.hpp"

#include <algorithm>
#include <exception>
#include <functional>
#include <mutex>
#include <numeric>
#include <thread>
#include <unordered_map>

#include "boxlift/errors.hpp"
#include "boxlift/priors.hpp"

namespace boxlift {

namespace {

// Runs fn(0..n-1) on up to `threads` workers. Results must be written to
// per-index slots; the schedule carries no ordering guarantees.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      fn(i);
    }
    return;
  }
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = static_cast<std::size_t>(w); i < n;
           i += static_cast<std::size_t>(workers)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) {
            first_error = std::current_exception();
          }
        }
      }
    });
  }
  for (std::thread& t : pool) {
    t.join();
  }
  if (first_error) {
    std::rethrow_exception(first_error);
  }
}

struct LiftedFrame {
  std::vector<Box3D> boxes;
  std::vector<std::optional<FeatureVec>> features;  // parallel to boxes
  std::optional<GroundPlane> ground;
};

// Feature for a lifted box, re-associated by projected IoU within its source
// camera. The detection whose frustum produced the cluster is not always the
// detection of the object the cluster belongs to (occlusions put one object's
// points inside another's 2D box), so the box is projected back and matched
// against all detections in that camera instead of trusting the source slot.
std::optional<FeatureVec> detection_feature(const Frame& frame, const LiftedBox& lifted) {
  for (std::size_t c = 0; c < frame.cameras.size(); ++c) {
    if (frame.cameras[c].camera_id != lifted.camera_id) {
      continue;
    }
    const std::optional<Box2D> proj = project_box3d_to_image(
        lifted.box, frame.cameras[c].lidar_to_camera, frame.cameras[c].intrinsics);
    if (!proj) {
      return std::nullopt;
    }
    const std::optional<std::size_t> match = nearest_2d_match(*proj, frame.detections2d[c]);
    if (!match) {
      return std::nullopt;
    }
    const Box2D& det = frame.detections2d[c][*match];
    if (det.feature_id) {
      return frame.features2d[static_cast<std::size_t>(*det.feature_id)];
    }
    return std::nullopt;
  }
  return std::nullopt;
}

// Greedy score-ordered suppression across cameras; survivors keep their
// original order.
LiftedFrame suppress_duplicates(const Frame& frame, const LiftResult& lift, double nms_iou) {
  std::vector<std::size_t> order(lift.boxes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return lift.boxes[a].box.score > lift.boxes[b].box.score;
  });
  std::vector<char> keep(lift.boxes.size(), 0);
  std::vector<std::size_t> kept;
  for (std::size_t idx : order) {
    bool suppressed = false;
    for (std::size_t other : kept) {
      if (iou_3d(lift.boxes[idx].box, lift.boxes[other].box) > nms_iou) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) {
      keep[idx] = 1;
      kept.push_back(idx);
    }
  }
  LiftedFrame out;
  out.ground = lift.ground;
  for (std::size_t i = 0; i < lift.boxes.size(); ++i) {
    if (keep[i]) {
      out.boxes.push_back(lift.boxes[i].box);
      out.features.push_back(detection_feature(frame, lift.boxes[i]));
    }
  }
  return out;
}

}  // namespace

PipelineResult run_pipeline(const Scene& scene, const PipelineConfig& cfg) {
  const std::size_t n = scene.frames.size();
  if (n == 0) {
    fail(ErrorCode::kEmptyInput, "run_pipeline: scene has no frames");
  }
  const std::vector<SizePrior> priors =
      scene.priors.empty() ? builtin_size_priors() : scene.priors;

  // Stage 1: lift every frame independently, then collapse cross-camera
  // duplicates of the same object.
  std::vector<LiftedFrame> lifted(n);
  parallel_for(n, cfg.threads, [&](std::size_t i) {
    LiftConfig lc = cfg.lift;
    lc.ransac.seed = cfg.seed ^ static_cast<std::uint64_t>(i);
    const LiftResult result = lift_frame_detailed(scene.frames[i], lc);
    lifted[i] = suppress_duplicates(scene.frames[i], result, cfg.lift_nms_iou);
  });

  // Stage 2: refine against both temporal neighbors. Recovered boxes inherit
  // the neighbor detection's feature; merged boxes keep the current one.
  std::vector<std::vector<Box3D>> refined(n);
  std::vector<std::vector<std::optional<FeatureVec>>> refined_features(n);
  if (cfg.temporal_enabled && n > 1) {
    parallel_for(n, cfg.threads, [&](std::size_t i) {
      const std::vector<Box3D>* prev = i > 0 ? &lifted[i - 1].boxes : nullptr;
      const std::vector<Box3D>* next = i + 1 < n ? &lifted[i + 1].boxes : nullptr;
      const EgoPose* prev_pose = i > 0 ? &scene.frames[i - 1].ego_pose : nullptr;
      const EgoPose* next_pose = i + 1 < n ? &scene.frames[i + 1].ego_pose : nullptr;
      BidirectionalResult result =
          temporal_update_bidirectional(lifted[i].boxes, prev, next, scene.frames[i].ego_pose,
                                        prev_pose, next_pose, cfg.temporal);
      refined[i] = std::move(result.boxes);
      refined_features[i].reserve(result.sources.size());
      for (const BoxSource& src : result.sources) {
        const LiftedFrame* origin = &lifted[i];
        if (src.origin == BoxSource::Origin::kPrev) {
          origin = &lifted[i - 1];
        } else if (src.origin == BoxSource::Origin::kNext) {
          origin = &lifted[i + 1];
        }
        refined_features[i].push_back(origin->features[src.index]);
      }
    });
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      refined[i] = lifted[i].boxes;
      refined_features[i] = lifted[i].features;
    }
  }

  // Stage 3: optional augmentation. The bank sees the whole scene's refined
  // boxes; placements are per-frame with seeds derived from the base seed so
  // thread count cannot change them.
  std::vector<std::vector<PlacedObject>> placed(n);
  if (cfg.spatial_enabled) {
    const ObjectBank bank = build_object_bank(scene.frames, refined, priors, cfg.spatial);
    parallel_for(n, cfg.threads, [&](std::size_t i) {
      SpatialConfig sc = cfg.spatial;
      sc.rng_seed = cfg.seed ^ static_cast<std::uint64_t>(i);
      const GroundPlane* ground = lifted[i].ground ? &*lifted[i].ground : nullptr;
      placed[i] = place_objects(refined[i], bank, sc, ground);
    });
  }

  // Stage 4: attach class labels. Without a catalog the feature path is
  // meaningless, so boxes fall through to the prior-shape rule.
  std::vector<std::vector<LabeledBox>> labeled(n);
  parallel_for(n, cfg.threads, [&](std::size_t i) {
    std::vector<std::optional<FeatureVec>> features = refined_features[i];
    if (scene.catalog.entries.empty()) {
      features.assign(refined[i].size(), std::nullopt);
    }
    labeled[i] =
        label_frame(refined[i], features, scene.frames[i], scene.catalog, priors, cfg.label);
  });

  PipelineResult out;
  const bool has_gt = std::any_of(scene.frames.begin(), scene.frames.end(),
                                  [](const Frame& f) { return !f.gt_boxes.empty(); });
  if (has_gt) {
    std::vector<std::vector<LabeledBox>> gt(n);
    for (std::size_t i = 0; i < n; ++i) {
      gt[i] = scene.frames[i].gt_boxes;
    }
    out.report = evaluate(labeled, gt, cfg.eval);
  }

  out.frames.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.frames[i].frame_id = scene.frames[i].frame_id;
    out.frames[i].lifted = std::move(lifted[i].boxes);
    out.frames[i].refined = std::move(refined[i]);
    out.frames[i].placed = std::move(placed[i]);
    out.frames[i].labeled = std::move(labeled[i]);
  }
  return out;
}

}  // namespace boxlift
