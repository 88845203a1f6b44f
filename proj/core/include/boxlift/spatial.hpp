#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "boxlift/geometry.hpp"
#include "boxlift/ground.hpp"
#include "boxlift/priors.hpp"
#include "boxlift/scene.hpp"

namespace boxlift {

struct SpatialConfig {
  double tau = 0.2;           // relative size tolerance of the prior gate
  double total_range = 54.0;  // annotated range d; placement and ratio ceiling
  int placements_per_frame = 8;
  std::uint64_t rng_seed = 0;
};

// Direct gate from the size-prior test: each dimension must lie within
// [(1 - tau) * prior, (1 + tau) * prior]. No footprint swap here.
bool prior_gate(double w, double l, double h, const SizePrior& prior, double tau);

// Gate with footprint symmetry: (w, l) and (l, w) both count, since an
// axis-aligned box cannot tell length from width. When several priors pass,
// the one minimizing sum(|dim - prior| / prior) wins; ties keep table order.
std::optional<std::size_t> matches_prior(const Box3D& box, std::span<const SizePrior> priors,
                                         double tau);

// One reserved object: its box, its interior points re-centered to the box
// center, and where it was seen.
struct BankEntry {
  Box3D box;
  std::vector<Vec3> points;  // relative to box.center
  std::int64_t source_frame = 0;
  double original_range = 0.0;  // horizontal range of the box center (d_ori)
  std::string matched_prior;
};

struct ObjectBank {
  std::vector<BankEntry> entries;
};

// Collects prior-conforming boxes across frames. boxes_per_frame is parallel
// to frames; interior points come from each frame's own cloud.
ObjectBank build_object_bank(std::span<const Frame> frames,
                             std::span<const std::vector<Box3D>> boxes_per_frame,
                             std::span<const SizePrior> priors, const SpatialConfig& cfg);

// Point retention ratio min(1, (d_total - d_new) / (d_total - d_ori)),
// clamped into [0, 1]. Throws kDegenerateRange when d_ori >= d_total.
double sampling_ratio(double d_total, double d_original, double d_new);

struct PlacedObject {
  Box3D box;
  std::vector<Vec3> points;  // absolute coordinates, all inside box
  double ratio = 1.0;
  std::int32_t bank_index = -1;
};

// Draws up to cfg.placements_per_frame bank entries and drops each at a
// seeded random range in (2, total_range) and azimuth in [0, 2pi), resting on
// the ground plane. A placement colliding with an existing or already placed
// box (any positive 3D IoU) is redrawn up to 10 times, then skipped. Kept
// points are the first ceil(ratio * n) of a seeded shuffle of the entry's
// points. When ground is null the entry keeps its original height.
std::vector<PlacedObject> place_objects(const std::vector<Box3D>& frame_boxes,
                                        const ObjectBank& bank, const SpatialConfig& cfg,
                                        const GroundPlane* ground = nullptr);

}  // namespace boxlift
