#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "boxlift/labels.hpp"

namespace boxlift {

struct RangeBand {
  std::string name;
  double max_range = 0.0;  // keep boxes with horizontal center range <= this
};

struct SizeGroup {
  std::string name;
  std::vector<std::string> classes;
};

struct EvalConfig {
  std::vector<double> thresholds{0.5, 1.0, 2.0, 4.0};  // center distance, meters
  std::vector<RangeBand> bands{{"near", 18.0}, {"midrange", 34.0}, {"far", 54.0}};
  std::vector<SizeGroup> groups{
      {"large", {"car", "truck", "construction_vehicle", "bus", "trailer"}},
      {"medium", {"barrier", "bicycle", "motorcycle"}},
      {"small", {"pedestrian", "traffic_cone"}},
  };
  // Truncated averaging: recall grid clipped below min_recall, precision
  // reduced by min_precision and renormalized. Off by default; the plain
  // 101-point interpolated AP is the primary number.
  bool truncated_ap = false;
  double min_recall = 0.1;
  double min_precision = 0.1;
};

struct GreedyMatch {
  std::int32_t pred_index = -1;  // position in the confidence-sorted input
  bool matched = false;
};

// Confidence-ordered greedy matching: each prediction takes the nearest still
// unmatched ground truth within the horizontal center-distance threshold.
// preds must already be sorted by descending confidence.
std::vector<GreedyMatch> greedy_match(const std::vector<LabeledBox>& preds,
                                      const std::vector<LabeledBox>& gts, double threshold);

// 101-point interpolated average precision over the confidence-ordered match
// flags. Zero ground truths yield 0 by definition.
double average_precision(const std::vector<GreedyMatch>& matches, std::size_t n_gt,
                         const EvalConfig& cfg);

// Fraction of ground truths matched. Throws kNoGroundTruth when n_gt is zero.
double average_recall(const std::vector<GreedyMatch>& matches, std::size_t n_gt);

struct ClassMetrics {
  std::string class_name;
  std::size_t n_gt = 0;
  std::vector<double> ap;  // parallel to cfg.thresholds
  std::vector<double> ar;
};

struct BandMetrics {
  std::string name;
  double max_range = 0.0;
  double map = 0.0;
  std::size_t n_classes = 0;  // classes with ground truth inside the band
};

struct GroupMetrics {
  std::string name;
  double map = 0.0;
  std::size_t n_classes = 0;
};

struct EvalReport {
  std::vector<double> thresholds;
  std::vector<ClassMetrics> per_class;          // classes with >= 1 GT, sorted by name
  std::vector<double> map_per_threshold;        // mean AP over classes, per threshold
  double map = 0.0;                             // mean over classes and thresholds
  std::vector<BandMetrics> bands;
  std::vector<GroupMetrics> groups;
  std::size_t n_frames = 0;
  bool truncated_ap = false;
};

// Multi-frame evaluation. Matching runs per frame and per class; detections
// are then pooled across frames in global confidence order for the precision
// curve. Classes absent from the ground truth never enter a mean.
EvalReport evaluate(const std::vector<std::vector<LabeledBox>>& preds_by_frame,
                    const std::vector<std::vector<LabeledBox>>& gts_by_frame,
                    const EvalConfig& cfg);

// Single-frame convenience overload.
EvalReport evaluate(const std::vector<LabeledBox>& preds, const std::vector<LabeledBox>& gts,
                    const EvalConfig& cfg);

// Deterministic renderings: a human-readable text report and a flat CSV table
// (scope,name,class,threshold,metric,value).
std::string render_report_text(const EvalReport& report);
std::string render_report_csv(const EvalReport& report);

}  // namespace boxlift
