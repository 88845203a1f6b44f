#include "boxlift/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "boxlift/errors.hpp"

namespace boxlift {

namespace {

constexpr int kPlacementRetries = 10;
constexpr double kMinPlacementRange = 2.0;  // meters; never paste on top of the ego

double gate_distance(double w, double l, double h, const SizePrior& p) {
  return std::abs(w - p.w) / p.w + std::abs(l - p.l) / p.l + std::abs(h - p.h) / p.h;
}

}  // namespace

bool prior_gate(double w, double l, double h, const SizePrior& prior, double tau) {
  const auto within = [tau](double dim, double ref) {
    return dim >= (1.0 - tau) * ref && dim <= (1.0 + tau) * ref;
  };
  return within(w, prior.w) && within(l, prior.l) && within(h, prior.h);
}

std::optional<std::size_t> matches_prior(const Box3D& box, std::span<const SizePrior> priors,
                                         double tau) {
  std::optional<std::size_t> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < priors.size(); ++i) {
    const SizePrior& p = priors[i];
    double dist = std::numeric_limits<double>::infinity();
    if (prior_gate(box.w, box.l, box.h, p, tau)) {
      dist = gate_distance(box.w, box.l, box.h, p);
    }
    if (prior_gate(box.l, box.w, box.h, p, tau)) {
      dist = std::min(dist, gate_distance(box.l, box.w, box.h, p));
    }
    if (dist < best_dist) {
      best_dist = dist;
      best = i;
    }
  }
  return best;
}

ObjectBank build_object_bank(std::span<const Frame> frames,
                             std::span<const std::vector<Box3D>> boxes_per_frame,
                             std::span<const SizePrior> priors, const SpatialConfig& cfg) {
  if (frames.size() != boxes_per_frame.size()) {
    fail(ErrorCode::kShapeMismatch, "build_object_bank: frames and box lists disagree");
  }
  ObjectBank bank;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const Frame& frame = frames[f];
    for (const Box3D& box : boxes_per_frame[f]) {
      const std::optional<std::size_t> match = matches_prior(box, priors, cfg.tau);
      if (!match) {
        continue;
      }
      BankEntry entry;
      entry.box = box;
      entry.source_frame = frame.frame_id;
      entry.original_range = horizontal_range(box.center);
      entry.matched_prior = priors[*match].class_name;
      for (const Vec3& p : frame.points.points) {
        if (contains(box, p)) {
          entry.points.push_back(p - box.center);
        }
      }
      bank.entries.push_back(std::move(entry));
    }
  }
  return bank;
}

double sampling_ratio(double d_total, double d_original, double d_new) {
  if (d_original >= d_total) {
    fail(ErrorCode::kDegenerateRange, "sampling_ratio: original range beyond total range");
  }
  return std::clamp((d_total - d_new) / (d_total - d_original), 0.0, 1.0);
}

std::vector<PlacedObject> place_objects(const std::vector<Box3D>& frame_boxes,
                                        const ObjectBank& bank, const SpatialConfig& cfg,
                                        const GroundPlane* ground) {
  std::vector<PlacedObject> placed;
  if (bank.entries.empty() || cfg.placements_per_frame <= 0) {
    return placed;
  }

  std::mt19937_64 rng(cfg.rng_seed);
  std::uniform_int_distribution<std::size_t> pick_entry(0, bank.entries.size() - 1);
  std::uniform_real_distribution<double> pick_range(kMinPlacementRange, cfg.total_range);
  std::uniform_real_distribution<double> pick_azimuth(0.0, 2.0 * std::numbers::pi);

  for (int slot = 0; slot < cfg.placements_per_frame; ++slot) {
    const std::size_t entry_idx = pick_entry(rng);
    const BankEntry& entry = bank.entries[entry_idx];
    if (entry.original_range >= cfg.total_range) {
      continue;  // ratio undefined for this entry, skip the slot
    }

    for (int attempt = 0; attempt < kPlacementRetries; ++attempt) {
      const double range = pick_range(rng);
      const double azimuth = pick_azimuth(rng);
      Box3D candidate = entry.box;
      candidate.center.x = range * std::cos(azimuth);
      candidate.center.y = range * std::sin(azimuth);
      if (ground != nullptr && ground->normal.z != 0.0) {
        const double plane_z = -(ground->offset + ground->normal.x * candidate.center.x +
                                 ground->normal.y * candidate.center.y) /
                               ground->normal.z;
        candidate.center.z = plane_z + 0.5 * candidate.h;
      }

      bool collides = false;
      for (const Box3D& b : frame_boxes) {
        if (iou_3d(candidate, b) > 0.0) {
          collides = true;
          break;
        }
      }
      for (const PlacedObject& p : placed) {
        if (collides) break;
        if (iou_3d(candidate, p.box) > 0.0) {
          collides = true;
        }
      }
      if (collides) {
        continue;
      }

      PlacedObject obj;
      obj.box = candidate;
      obj.bank_index = static_cast<std::int32_t>(entry_idx);
      obj.ratio = sampling_ratio(cfg.total_range, entry.original_range, range);

      std::vector<Vec3> shuffled = entry.points;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      const std::size_t keep = std::min(
          shuffled.size(),
          static_cast<std::size_t>(std::ceil(obj.ratio * static_cast<double>(shuffled.size()))));
      obj.points.reserve(keep);
      for (std::size_t i = 0; i < keep; ++i) {
        obj.points.push_back(candidate.center + shuffled[i]);
      }
      placed.push_back(std::move(obj));
      break;
    }
  }
  return placed;
}

}  // namespace boxlift
