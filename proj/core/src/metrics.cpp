#include "boxlift/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>

#include "boxlift/errors.hpp"

namespace boxlift {

namespace {

double center_distance(const LabeledBox& a, const LabeledBox& b) {
  return std::hypot(a.box.center.x - b.box.center.x, a.box.center.y - b.box.center.y);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

// Precision envelope sampled on the 101-point recall grid:
// grid[c] = max precision among operating points whose recall reaches c/100,
// zero where the curve never gets that far.
std::array<double, 101> precision_grid(const std::vector<GreedyMatch>& matches,
                                       std::size_t n_gt) {
  std::vector<std::pair<double, double>> curve;  // (recall, precision)
  curve.reserve(matches.size());
  std::size_t tp = 0;
  for (std::size_t k = 0; k < matches.size(); ++k) {
    if (matches[k].matched) {
      ++tp;
    }
    curve.emplace_back(static_cast<double>(tp) / static_cast<double>(n_gt),
                       static_cast<double>(tp) / static_cast<double>(k + 1));
  }
  std::array<double, 101> grid{};
  for (int c = 0; c <= 100; ++c) {
    const double r = static_cast<double>(c) / 100.0;
    double best = 0.0;
    for (const auto& [recall, precision] : curve) {
      // The tiny slack keeps recalls that are exactly on a grid cell (they
      // are ratios of small integers) from falling off it through rounding.
      if (recall + 1e-12 >= r) {
        best = std::max(best, precision);
      }
    }
    grid[static_cast<std::size_t>(c)] = best;
  }
  return grid;
}

}  // namespace

std::vector<GreedyMatch> greedy_match(const std::vector<LabeledBox>& preds,
                                      const std::vector<LabeledBox>& gts, double threshold) {
  std::vector<GreedyMatch> out;
  out.reserve(preds.size());
  std::vector<char> gt_taken(gts.size(), 0);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    double best_dist = std::numeric_limits<double>::infinity();
    std::size_t best_gt = 0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (gt_taken[g]) {
        continue;
      }
      const double d = center_distance(preds[i], gts[g]);
      if (d < best_dist) {
        best_dist = d;
        best_gt = g;
      }
    }
    const bool matched = best_dist <= threshold;
    if (matched) {
      gt_taken[best_gt] = 1;
    }
    out.push_back({static_cast<std::int32_t>(i), matched});
  }
  return out;
}

double average_precision(const std::vector<GreedyMatch>& matches, std::size_t n_gt,
                         const EvalConfig& cfg) {
  if (n_gt == 0) {
    return 0.0;
  }
  const std::array<double, 101> grid = precision_grid(matches, n_gt);
  if (!cfg.truncated_ap) {
    double sum = 0.0;
    for (const double p : grid) {
      sum += p;
    }
    return sum / 101.0;
  }
  // Truncated averaging: skip the low-recall cells, shave min_precision off
  // and renormalize so a perfect detector still scores 1.
  const int first = static_cast<int>(std::lround(cfg.min_recall * 100.0)) + 1;
  double sum = 0.0;
  int count = 0;
  for (int c = first; c <= 100; ++c) {
    sum += std::max(0.0, grid[static_cast<std::size_t>(c)] - cfg.min_precision);
    ++count;
  }
  if (count == 0 || cfg.min_precision >= 1.0) {
    return 0.0;
  }
  return sum / static_cast<double>(count) / (1.0 - cfg.min_precision);
}

double average_recall(const std::vector<GreedyMatch>& matches, std::size_t n_gt) {
  if (n_gt == 0) {
    fail(ErrorCode::kNoGroundTruth, "average_recall: no ground truth");
  }
  std::size_t matched = 0;
  for (const GreedyMatch& m : matches) {
    if (m.matched) {
      ++matched;
    }
  }
  return static_cast<double>(matched) / static_cast<double>(n_gt);
}

namespace {

struct ClassFrame {
  std::vector<LabeledBox> preds;  // confidence-descending
  std::vector<LabeledBox> gts;
};

// Per-class detections and ground truth, split by frame, predictions sorted
// by descending confidence (stable, so equal scores keep input order).
std::map<std::string, std::vector<ClassFrame>> split_by_class(
    const std::vector<std::vector<LabeledBox>>& preds_by_frame,
    const std::vector<std::vector<LabeledBox>>& gts_by_frame) {
  std::map<std::string, std::vector<ClassFrame>> by_class;
  const std::size_t n_frames = gts_by_frame.size();
  std::set<std::string> names;
  for (const auto& frame : gts_by_frame) {
    for (const LabeledBox& gt : frame) {
      names.insert(gt.class_name);
    }
  }
  for (const std::string& name : names) {
    auto& frames = by_class[name];
    frames.resize(n_frames);
    for (std::size_t f = 0; f < n_frames; ++f) {
      for (const LabeledBox& gt : gts_by_frame[f]) {
        if (gt.class_name == name) {
          frames[f].gts.push_back(gt);
        }
      }
      if (f < preds_by_frame.size()) {
        for (const LabeledBox& pred : preds_by_frame[f]) {
          if (pred.class_name == name) {
            frames[f].preds.push_back(pred);
          }
        }
      }
      std::stable_sort(frames[f].preds.begin(), frames[f].preds.end(),
                       [](const LabeledBox& a, const LabeledBox& b) {
                         return a.confidence > b.confidence;
                       });
    }
  }
  return by_class;
}

struct PooledMatches {
  std::vector<GreedyMatch> matches;  // global confidence order
  std::size_t n_gt = 0;
};

// Matches within each frame, pooled across frames in global confidence order.
PooledMatches pool_matches(const std::vector<ClassFrame>& frames, double threshold) {
  PooledMatches pooled;
  std::vector<std::pair<double, bool>> dets;  // (confidence, matched)
  for (const ClassFrame& cf : frames) {
    pooled.n_gt += cf.gts.size();
    const std::vector<GreedyMatch> frame_matches = greedy_match(cf.preds, cf.gts, threshold);
    for (const GreedyMatch& m : frame_matches) {
      dets.emplace_back(cf.preds[static_cast<std::size_t>(m.pred_index)].confidence, m.matched);
    }
  }
  std::stable_sort(dets.begin(), dets.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  pooled.matches.reserve(dets.size());
  for (std::size_t i = 0; i < dets.size(); ++i) {
    pooled.matches.push_back({static_cast<std::int32_t>(i), dets[i].second});
  }
  return pooled;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) {
    return 0.0;
  }
  double sum = 0.0;
  for (const double x : v) {
    sum += x;
  }
  return sum / static_cast<double>(v.size());
}

std::vector<std::vector<LabeledBox>> filter_range(
    const std::vector<std::vector<LabeledBox>>& frames, double max_range) {
  std::vector<std::vector<LabeledBox>> out(frames.size());
  for (std::size_t f = 0; f < frames.size(); ++f) {
    for (const LabeledBox& b : frames[f]) {
      if (horizontal_range(b.box.center) <= max_range) {
        out[f].push_back(b);
      }
    }
  }
  return out;
}

// Per-class AP table: class -> AP per threshold. Shared by the headline
// numbers, the range bands and the size groups.
std::map<std::string, std::vector<double>> ap_table(
    const std::vector<std::vector<LabeledBox>>& preds_by_frame,
    const std::vector<std::vector<LabeledBox>>& gts_by_frame, const EvalConfig& cfg) {
  std::map<std::string, std::vector<double>> table;
  for (const auto& [name, frames] : split_by_class(preds_by_frame, gts_by_frame)) {
    std::size_t total_gt = 0;
    for (const ClassFrame& cf : frames) {
      total_gt += cf.gts.size();
    }
    if (total_gt == 0) {
      continue;
    }
    std::vector<double> aps;
    aps.reserve(cfg.thresholds.size());
    for (const double threshold : cfg.thresholds) {
      const PooledMatches pooled = pool_matches(frames, threshold);
      aps.push_back(average_precision(pooled.matches, pooled.n_gt, cfg));
    }
    table[name] = std::move(aps);
  }
  return table;
}

}  // namespace

EvalReport evaluate(const std::vector<std::vector<LabeledBox>>& preds_by_frame,
                    const std::vector<std::vector<LabeledBox>>& gts_by_frame,
                    const EvalConfig& cfg) {
  if (preds_by_frame.size() != gts_by_frame.size()) {
    fail(ErrorCode::kShapeMismatch, "evaluate: prediction and ground-truth frame counts differ");
  }
  EvalReport report;
  report.thresholds = cfg.thresholds;
  report.n_frames = gts_by_frame.size();
  report.truncated_ap = cfg.truncated_ap;

  const auto by_class = split_by_class(preds_by_frame, gts_by_frame);
  for (const auto& [name, frames] : by_class) {
    ClassMetrics cm;
    cm.class_name = name;
    for (const ClassFrame& cf : frames) {
      cm.n_gt += cf.gts.size();
    }
    if (cm.n_gt == 0) {
      continue;
    }
    for (const double threshold : cfg.thresholds) {
      const PooledMatches pooled = pool_matches(frames, threshold);
      cm.ap.push_back(average_precision(pooled.matches, pooled.n_gt, cfg));
      cm.ar.push_back(average_recall(pooled.matches, pooled.n_gt));
    }
    report.per_class.push_back(std::move(cm));
  }

  for (std::size_t t = 0; t < cfg.thresholds.size(); ++t) {
    std::vector<double> aps;
    for (const ClassMetrics& cm : report.per_class) {
      aps.push_back(cm.ap[t]);
    }
    report.map_per_threshold.push_back(mean(aps));
  }
  {
    std::vector<double> class_means;
    for (const ClassMetrics& cm : report.per_class) {
      class_means.push_back(mean(cm.ap));
    }
    report.map = mean(class_means);
  }

  for (const RangeBand& band : cfg.bands) {
    const auto banded_preds = filter_range(preds_by_frame, band.max_range);
    const auto banded_gts = filter_range(gts_by_frame, band.max_range);
    const auto table = ap_table(banded_preds, banded_gts, cfg);
    std::vector<double> class_means;
    for (const auto& [name, aps] : table) {
      class_means.push_back(mean(aps));
    }
    report.bands.push_back({band.name, band.max_range, mean(class_means), table.size()});
  }

  for (const SizeGroup& group : cfg.groups) {
    std::vector<double> class_means;
    for (const ClassMetrics& cm : report.per_class) {
      if (std::find(group.classes.begin(), group.classes.end(), cm.class_name) !=
          group.classes.end()) {
        class_means.push_back(mean(cm.ap));
      }
    }
    report.groups.push_back({group.name, mean(class_means), class_means.size()});
  }
  return report;
}

EvalReport evaluate(const std::vector<LabeledBox>& preds, const std::vector<LabeledBox>& gts,
                    const EvalConfig& cfg) {
  return evaluate(std::vector<std::vector<LabeledBox>>{preds},
                  std::vector<std::vector<LabeledBox>>{gts}, cfg);
}

std::string render_report_text(const EvalReport& report) {
  std::string out;
  out += "evaluation report\n";
  out += "frames: " + std::to_string(report.n_frames) + "\n";
  out += "thresholds_m:";
  for (const double t : report.thresholds) {
    out += " " + format_double(t);
  }
  out += "\n";
  out += std::string("ap_mode: ") + (report.truncated_ap ? "truncated" : "interp101") + "\n\n";

  for (const ClassMetrics& cm : report.per_class) {
    out += "[class " + cm.class_name + "]\n";
    out += "n_gt: " + std::to_string(cm.n_gt) + "\n";
    for (std::size_t t = 0; t < report.thresholds.size(); ++t) {
      out += "ap@" + format_double(report.thresholds[t]) + ": " + format_double(cm.ap[t]) + "\n";
    }
    for (std::size_t t = 0; t < report.thresholds.size(); ++t) {
      out += "ar@" + format_double(report.thresholds[t]) + ": " + format_double(cm.ar[t]) + "\n";
    }
    out += "\n";
  }

  out += "[summary]\n";
  for (std::size_t t = 0; t < report.thresholds.size(); ++t) {
    out += "map@" + format_double(report.thresholds[t]) + ": " +
           format_double(report.map_per_threshold[t]) + "\n";
  }
  out += "map: " + format_double(report.map) + "\n\n";

  out += "[bands]\n";
  for (const BandMetrics& b : report.bands) {
    out += b.name + " (range <= " + format_double(b.max_range) +
           " m): map=" + format_double(b.map) + " classes=" + std::to_string(b.n_classes) + "\n";
  }
  out += "\n[groups]\n";
  for (const GroupMetrics& g : report.groups) {
    out += g.name + ": map=" + format_double(g.map) + " classes=" + std::to_string(g.n_classes) +
           "\n";
  }
  return out;
}

std::string render_report_csv(const EvalReport& report) {
  std::string out = "scope,name,class,threshold,metric,value\n";
  const auto row = [&out](const std::string& scope, const std::string& name,
                          const std::string& cls, const std::string& threshold,
                          const std::string& metric, double value) {
    out += scope + "," + name + "," + cls + "," + threshold + "," + metric + "," +
           format_double(value) + "\n";
  };
  for (const ClassMetrics& cm : report.per_class) {
    for (std::size_t t = 0; t < report.thresholds.size(); ++t) {
      row("overall", "", cm.class_name, format_double(report.thresholds[t]), "ap", cm.ap[t]);
      row("overall", "", cm.class_name, format_double(report.thresholds[t]), "ar", cm.ar[t]);
    }
  }
  for (std::size_t t = 0; t < report.thresholds.size(); ++t) {
    row("overall", "", "", format_double(report.thresholds[t]), "map",
        report.map_per_threshold[t]);
  }
  row("overall", "", "", "", "map", report.map);
  for (const BandMetrics& b : report.bands) {
    row("band", b.name, "", "", "map", b.map);
  }
  for (const GroupMetrics& g : report.groups) {
    row("group", g.name, "", "", "map", g.map);
  }
  return out;
}

}  // namespace boxlift
