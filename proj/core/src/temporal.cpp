#include "boxlift/temporal.hpp"

#include <algorithm>
#include <numeric>

namespace boxlift {

Box3D project_box_between_frames(const Box3D& box, const EgoPose& src, const EgoPose& dst) {
  const RigidTransform chain =
      compose(invert(dst.lidar_to_ego),
              compose(invert(dst.ego_to_global), compose(src.ego_to_global, src.lidar_to_ego)));
  std::array<Vec3, 8> pts = corners(box);
  for (Vec3& p : pts) {
    p = apply(chain, p);
  }
  Box3D out = bounding_box(pts);
  out.score = box.score;
  out.class_id = box.class_id;
  return out;
}

OverlapMatrix build_overlap_matrix(const std::vector<Box3D>& projected,
                                   const std::vector<Box3D>& current) {
  OverlapMatrix m;
  m.rows = projected.size();
  m.cols = current.size();
  m.values.resize(m.rows * m.cols);
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) {
      m.values[i * m.cols + j] = iou_3d(projected[i], current[j]);
    }
  }
  return m;
}

TemporalResult temporal_update_detailed(const std::vector<Box3D>& current,
                                        const std::vector<Box3D>& neighbor,
                                        const EgoPose& current_pose, const EgoPose& neighbor_pose,
                                        const TemporalConfig& cfg) {
  std::vector<Box3D> projected;
  projected.reserve(neighbor.size());
  for (const Box3D& b : neighbor) {
    projected.push_back(project_box_between_frames(b, neighbor_pose, current_pose));
  }
  const OverlapMatrix overlap = build_overlap_matrix(projected, current);

  struct Working {
    Box3D box;
    TemporalProvenance prov;
    bool is_envelope = false;
    bool alive = true;
  };
  std::vector<Working> main;  // current-derived slots, original order
  main.reserve(current.size());
  for (std::size_t j = 0; j < current.size(); ++j) {
    main.push_back({current[j],
                    {TemporalProvenance::Kind::kOriginal, static_cast<std::int32_t>(j), -1},
                    false,
                    true});
  }
  std::vector<Working> recovered;

  // Decisions are made against the original overlap matrix; merges mutate the
  // running slot so stacked merges keep growing one envelope.
  for (std::size_t i = 0; i < projected.size(); ++i) {
    double best = 0.0;
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < current.size(); ++j) {
      if (overlap.at(i, j) > best) {
        best = overlap.at(i, j);
        best_j = j;
      }
    }
    if (best <= cfg.zero_iou_eps) {
      // Missed in the current frame entirely; carry the neighbor's box over.
      recovered.push_back(
          {projected[i],
           {TemporalProvenance::Kind::kRecovered, -1, static_cast<std::int32_t>(i)},
           false,
           true});
    } else if (horizontal_range(projected[i].center) > cfg.far_distance) {
      Working& slot = main[best_j];
      slot.box = envelope(slot.box, projected[i]);
      slot.prov.kind = TemporalProvenance::Kind::kMerged;
      slot.prov.neighbor_index = static_cast<std::int32_t>(i);
      slot.is_envelope = true;
    }
    // Overlapping within far_distance: the current box already covers it.
  }

  // Duplicate suppression is scoped to pairs that involve a merge envelope;
  // untouched boxes never suppress each other. Higher score survives, ties
  // keep the earlier slot.
  std::vector<Working*> all;
  for (Working& w : main) all.push_back(&w);
  for (Working& w : recovered) all.push_back(&w);
  std::vector<std::size_t> order(all.size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return all[a]->box.score > all[b]->box.score;
  });
  std::vector<std::size_t> kept;
  for (const std::size_t idx : order) {
    Working* w = all[idx];
    bool suppressed = false;
    for (const std::size_t k : kept) {
      Working* other = all[k];
      if (!w->is_envelope && !other->is_envelope) {
        continue;
      }
      if (iou_3d(w->box, other->box) > cfg.nms_iou) {
        suppressed = true;
        break;
      }
    }
    if (suppressed) {
      w->alive = false;
    } else {
      kept.push_back(idx);
    }
  }

  TemporalResult result;
  for (const Working& w : main) {
    if (w.alive) {
      result.boxes.push_back(w.box);
      result.provenance.push_back(w.prov);
    }
  }
  for (const Working& w : recovered) {
    if (w.alive) {
      result.boxes.push_back(w.box);
      result.provenance.push_back(w.prov);
    }
  }
  return result;
}

std::vector<Box3D> temporal_update(const std::vector<Box3D>& current,
                                   const std::vector<Box3D>& neighbor, const EgoPose& current_pose,
                                   const EgoPose& neighbor_pose, const TemporalConfig& cfg) {
  return temporal_update_detailed(current, neighbor, current_pose, neighbor_pose, cfg).boxes;
}

BidirectionalResult temporal_update_bidirectional(const std::vector<Box3D>& current,
                                                  const std::vector<Box3D>* prev,
                                                  const std::vector<Box3D>* next,
                                                  const EgoPose& current_pose,
                                                  const EgoPose* prev_pose,
                                                  const EgoPose* next_pose,
                                                  const TemporalConfig& cfg) {
  BidirectionalResult result;
  result.boxes = current;
  result.sources.resize(current.size());
  for (std::size_t i = 0; i < current.size(); ++i) {
    result.sources[i] = {BoxSource::Origin::kCurrent, static_cast<std::int32_t>(i)};
  }

  const auto apply_pass = [&](const std::vector<Box3D>& nbr, const EgoPose& nbr_pose,
                              BoxSource::Origin origin) {
    const TemporalResult pass =
        temporal_update_detailed(result.boxes, nbr, current_pose, nbr_pose, cfg);
    std::vector<BoxSource> sources;
    sources.reserve(pass.boxes.size());
    for (const TemporalProvenance& prov : pass.provenance) {
      if (prov.kind == TemporalProvenance::Kind::kRecovered) {
        sources.push_back({origin, prov.neighbor_index});
      } else {
        // Original or merged: primary parent is the running current-side box.
        sources.push_back(result.sources[static_cast<std::size_t>(prov.current_index)]);
      }
    }
    result.boxes = pass.boxes;
    result.sources = std::move(sources);
  };

  if (next != nullptr && next_pose != nullptr) {
    apply_pass(*next, *next_pose, BoxSource::Origin::kNext);
  }
  if (prev != nullptr && prev_pose != nullptr) {
    apply_pass(*prev, *prev_pose, BoxSource::Origin::kPrev);
  }
  return result;
}

}  // namespace boxlift
