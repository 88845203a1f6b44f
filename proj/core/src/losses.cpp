#include "boxlift/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "boxlift/errors.hpp"

namespace boxlift {

MatchResult hungarian_match(const std::vector<double>& cost, std::size_t n_targets,
                            std::size_t n_preds) {
  if (n_targets > n_preds) {
    fail(ErrorCode::kShapeMismatch, "hungarian_match: more targets than predictions");
  }
  if (cost.size() != n_targets * n_preds) {
    fail(ErrorCode::kShapeMismatch, "hungarian_match: cost matrix size mismatch");
  }

  MatchResult result;
  result.pred_for_target.assign(n_targets, -1);
  if (n_targets == 0) {
    return result;
  }

  // Potentials-based assignment (Kuhn-Munkres with successive shortest
  // augmenting paths), 1-based scratch arrays, rows = targets.
  const std::size_t n = n_targets;
  const std::size_t m = n_preds;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> match(m + 1, 0), way(m + 1, 0);

  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) {
          continue;
        }
        const double cur = cost[(i0 - 1) * m + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  for (std::size_t j = 1; j <= m; ++j) {
    if (match[j] != 0) {
      result.pred_for_target[match[j] - 1] = static_cast<std::int32_t>(j - 1);
    }
  }
  // Summed straight off the matrix in row order so the total is reproducible
  // independent of the algorithm's internal arithmetic.
  for (std::size_t t = 0; t < n_targets; ++t) {
    result.total_cost += cost[t * m + static_cast<std::size_t>(result.pred_for_target[t])];
  }
  return result;
}

double focal_loss(double p, bool is_positive, double alpha, double gamma) {
  if (!(p > 0.0 && p < 1.0)) {
    fail(ErrorCode::kDomain, "focal_loss: score must lie strictly inside (0, 1)");
  }
  if (is_positive) {
    return -alpha * std::pow(1.0 - p, gamma) * std::log(p);
  }
  return -(1.0 - alpha) * std::pow(p, gamma) * std::log(1.0 - p);
}

double l1_box_loss(const Box3D& a, const Box3D& b) {
  return std::abs(a.center.x - b.center.x) + std::abs(a.center.y - b.center.y) +
         std::abs(a.center.z - b.center.z) + std::abs(a.w - b.w) + std::abs(a.l - b.l) +
         std::abs(a.h - b.h);
}

GenericLoss generic_object_loss(const std::vector<Prediction>& preds,
                                const std::vector<Box3D>& targets, const LossConfig& cfg) {
  if (preds.size() < targets.size()) {
    fail(ErrorCode::kShapeMismatch, "generic_object_loss: fewer predictions than targets");
  }
  GenericLoss loss;

  const std::size_t n_t = targets.size();
  const std::size_t n_p = preds.size();
  std::vector<char> is_matched(n_p, 0);
  if (n_t > 0) {
    std::vector<double> cost(n_t * n_p);
    for (std::size_t t = 0; t < n_t; ++t) {
      for (std::size_t p = 0; p < n_p; ++p) {
        cost[t * n_p + p] =
            cfg.focal_weight * focal_loss(preds[p].objectness, true, cfg.alpha, cfg.gamma) +
            cfg.l1_weight * l1_box_loss(preds[p].box, targets[t]);
      }
    }
    const MatchResult match = hungarian_match(cost, n_t, n_p);
    for (std::size_t t = 0; t < n_t; ++t) {
      const std::size_t p = static_cast<std::size_t>(match.pred_for_target[t]);
      is_matched[p] = 1;
      loss.matched_focal += focal_loss(preds[p].objectness, true, cfg.alpha, cfg.gamma);
      loss.matched_l1 += l1_box_loss(preds[p].box, targets[t]);
    }
  }
  for (std::size_t p = 0; p < n_p; ++p) {
    if (!is_matched[p]) {
      loss.unmatched_focal += focal_loss(preds[p].objectness, false, cfg.alpha, cfg.gamma);
    }
  }
  loss.total = loss.matched_focal + loss.matched_l1 + loss.unmatched_focal;
  return loss;
}

namespace {

// log(sum_j exp(x_j)) over a subset, stabilized by the running maximum.
double log_sum_exp(const std::vector<double>& x, const std::vector<std::int32_t>* subset) {
  double max_x = -std::numeric_limits<double>::infinity();
  const auto consider = [&](double v) { max_x = std::max(max_x, v); };
  if (subset != nullptr) {
    for (const std::int32_t j : *subset) consider(x[static_cast<std::size_t>(j)]);
  } else {
    for (const double v : x) consider(v);
  }
  double sum = 0.0;
  if (subset != nullptr) {
    for (const std::int32_t j : *subset) sum += std::exp(x[static_cast<std::size_t>(j)] - max_x);
  } else {
    for (const double v : x) sum += std::exp(v - max_x);
  }
  return max_x + std::log(sum);
}

void check_alignment_args(const std::vector<FeatureVec>& f3d, const std::vector<FeatureVec>& f2d,
                          const std::vector<std::vector<std::int32_t>>& positives, double delta) {
  if (delta <= 0.0) {
    fail(ErrorCode::kDomain, "alignment_loss: temperature must be positive");
  }
  if (f3d.empty() || f2d.empty()) {
    fail(ErrorCode::kEmptyInput, "alignment_loss: empty feature list");
  }
  if (positives.size() != f3d.size()) {
    fail(ErrorCode::kShapeMismatch, "alignment_loss: positives not parallel to f3d");
  }
  for (const auto& set : positives) {
    if (set.empty()) {
      fail(ErrorCode::kEmptyPositiveSet, "alignment_loss: a feature has no positive matches");
    }
    for (const std::int32_t j : set) {
      if (j < 0 || static_cast<std::size_t>(j) >= f2d.size()) {
        fail(ErrorCode::kShapeMismatch, "alignment_loss: positive index out of range");
      }
    }
  }
}

}  // namespace

double alignment_loss(const std::vector<FeatureVec>& f3d, const std::vector<FeatureVec>& f2d,
                      const std::vector<std::vector<std::int32_t>>& positives, double delta) {
  check_alignment_args(f3d, f2d, positives, delta);
  double total = 0.0;
  std::vector<double> logits(f2d.size());
  for (std::size_t i = 0; i < f3d.size(); ++i) {
    for (std::size_t k = 0; k < f2d.size(); ++k) {
      logits[k] = dot(f3d[i], f2d[k]) / delta;
    }
    // -log(sum_pos / sum_all) == lse_all - lse_pos, nonnegative by inclusion.
    total += log_sum_exp(logits, nullptr) - log_sum_exp(logits, &positives[i]);
  }
  return total / static_cast<double>(f3d.size());
}

std::vector<FeatureVec> alignment_loss_gradient(
    const std::vector<FeatureVec>& f3d, const std::vector<FeatureVec>& f2d,
    const std::vector<std::vector<std::int32_t>>& positives, double delta) {
  check_alignment_args(f3d, f2d, positives, delta);
  const std::size_t dim = f3d.front().dim();
  const double inv_n = 1.0 / static_cast<double>(f3d.size());

  std::vector<FeatureVec> grad(f3d.size());
  std::vector<double> logits(f2d.size());
  for (std::size_t i = 0; i < f3d.size(); ++i) {
    grad[i].values.assign(dim, 0.0);
    for (std::size_t k = 0; k < f2d.size(); ++k) {
      logits[k] = dot(f3d[i], f2d[k]) / delta;
    }
    const double lse_all = log_sum_exp(logits, nullptr);
    const double lse_pos = log_sum_exp(logits, &positives[i]);
    // d/df3d_i = (1/N) * sum_k (softmax_all(k) - softmax_pos(k)) * f2d_k / delta,
    // where softmax_pos is zero outside the positive set.
    for (std::size_t k = 0; k < f2d.size(); ++k) {
      const double w_all = std::exp(logits[k] - lse_all);
      for (std::size_t d = 0; d < dim; ++d) {
        grad[i].values[d] += inv_n * w_all * f2d[k].values[d] / delta;
      }
    }
    for (const std::int32_t j : positives[i]) {
      const double w_pos = std::exp(logits[static_cast<std::size_t>(j)] - lse_pos);
      for (std::size_t d = 0; d < dim; ++d) {
        grad[i].values[d] -= inv_n * w_pos * f2d[static_cast<std::size_t>(j)].values[d] / delta;
      }
    }
  }
  return grad;
}

}  // namespace boxlift
