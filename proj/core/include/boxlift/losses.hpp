#pragma once

#include <cstdint>
#include <vector>

#include "boxlift/feature.hpp"
#include "boxlift/geometry.hpp"

namespace boxlift {

struct Prediction {
  Box3D box;
  double objectness = 0.5;  // in (0, 1)
};

struct LossConfig {
  double alpha = 0.25;  // focal loss positive weight
  double gamma = 2.0;   // focal loss focusing exponent
  double focal_weight = 1.0;
  double l1_weight = 1.0;
};

struct MatchResult {
  std::vector<std::int32_t> pred_for_target;  // one prediction per target
  double total_cost = 0.0;
};

// Optimal assignment of targets (rows) to predictions (columns) minimizing
// total cost, rows <= cols. cost is row-major n_targets x n_preds. Throws
// kShapeMismatch when rows exceed cols or sizes disagree.
MatchResult hungarian_match(const std::vector<double>& cost, std::size_t n_targets,
                            std::size_t n_preds);

// Binary focal loss for one score. p must be strictly inside (0, 1); kDomain
// otherwise.
double focal_loss(double p, bool is_positive, double alpha, double gamma);

// Sum of absolute differences over center and size, six terms (yaw is fixed
// at zero everywhere, so it contributes nothing).
double l1_box_loss(const Box3D& a, const Box3D& b);

struct GenericLoss {
  double matched_focal = 0.0;
  double matched_l1 = 0.0;
  double unmatched_focal = 0.0;
  double total = 0.0;
};

// Set-based detection loss: Hungarian matching under focal + L1 pair costs,
// then positive focal and L1 on matched pairs plus negative focal on the
// leftover predictions. Requires #preds >= #targets (kShapeMismatch).
GenericLoss generic_object_loss(const std::vector<Prediction>& preds,
                                const std::vector<Box3D>& targets, const LossConfig& cfg);

// Contrastive 2D-3D alignment loss. positives[i] lists the f2d indices that
// count as matches for f3d[i]; every listed index must be valid and every set
// non-empty (kEmptyPositiveSet). delta is the softmax temperature. Internally
// log-sum-exp stabilized, so large dot products are safe.
double alignment_loss(const std::vector<FeatureVec>& f3d, const std::vector<FeatureVec>& f2d,
                      const std::vector<std::vector<std::int32_t>>& positives, double delta);

// Analytic gradient of alignment_loss with respect to each f3d vector.
std::vector<FeatureVec> alignment_loss_gradient(
    const std::vector<FeatureVec>& f3d, const std::vector<FeatureVec>& f2d,
    const std::vector<std::vector<std::int32_t>>& positives, double delta);

}  // namespace boxlift
