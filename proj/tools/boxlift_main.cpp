// Command line front end for the pseudo-label pipeline. Subcommands cover
// scene synthesis, each pipeline stage, evaluation and BEV rendering; errors
// leave a machine-readable JSON diagnostic on stderr and a nonzero exit code.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "boxlift/bev_svg.hpp"
#include "boxlift/errors.hpp"
#include "boxlift/pipeline.hpp"
#include "boxlift/scene_io.hpp"
#include "boxlift/synth.hpp"

namespace {

using boxlift::Error;
using boxlift::ErrorCode;
using json = nlohmann::json;

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::string config_path;
  std::string out_dir = ".";
  int threads = 1;
};

// Rejects unknown keys so a typo in a config file cannot silently change a
// run.
void check_known_keys(const json& section, const std::set<std::string>& known,
                      const std::string& where) {
  for (const auto& [key, value] : section.items()) {
    (void)value;
    if (known.count(key) == 0) {
      boxlift::fail(ErrorCode::kSchema, "config: unknown key \"" + key + "\" in " + where);
    }
  }
}

json load_config(const std::string& path) {
  if (path.empty()) {
    return json::object();
  }
  std::ifstream in(path);
  if (!in) {
    boxlift::fail(ErrorCode::kIo, "config: cannot open " + path);
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    boxlift::fail(ErrorCode::kParse, "config: " + std::string(e.what()));
  }
  check_known_keys(doc, {"synth", "pipeline"}, "top level");
  return doc;
}

boxlift::SynthConfig synth_config(const json& config, const GlobalOptions& global) {
  boxlift::SynthConfig cfg;
  if (config.contains("synth")) {
    const json& s = config["synth"];
    check_known_keys(s,
                     {"seed", "n_frames", "frame_dt", "ego_speed", "lidar_range",
                      "objects_per_class", "size_jitter", "points_per_object_10m",
                      "ground_points", "ground_noise_sigma", "n_cameras", "image_width",
                      "image_height", "hfov_deg", "camera_height", "feature_dim",
                      "feature_noise_sigma", "dropout_rate", "with_masks"},
                     "synth");
    try {
      if (s.contains("seed")) cfg.seed = s["seed"].get<std::uint64_t>();
      if (s.contains("n_frames")) cfg.n_frames = s["n_frames"].get<int>();
      if (s.contains("frame_dt")) cfg.frame_dt = s["frame_dt"].get<double>();
      if (s.contains("ego_speed")) cfg.ego_speed = s["ego_speed"].get<double>();
      if (s.contains("lidar_range")) cfg.lidar_range = s["lidar_range"].get<double>();
      if (s.contains("objects_per_class")) {
        cfg.objects_per_class.clear();
        for (const auto& [name, count] : s["objects_per_class"].items()) {
          cfg.objects_per_class[name] = count.get<int>();
        }
      }
      if (s.contains("size_jitter")) cfg.size_jitter = s["size_jitter"].get<double>();
      if (s.contains("points_per_object_10m")) {
        cfg.points_per_object_10m = s["points_per_object_10m"].get<double>();
      }
      if (s.contains("ground_points")) cfg.ground_points = s["ground_points"].get<int>();
      if (s.contains("ground_noise_sigma")) {
        cfg.ground_noise_sigma = s["ground_noise_sigma"].get<double>();
      }
      if (s.contains("n_cameras")) cfg.n_cameras = s["n_cameras"].get<int>();
      if (s.contains("image_width")) cfg.image_width = s["image_width"].get<int>();
      if (s.contains("image_height")) cfg.image_height = s["image_height"].get<int>();
      if (s.contains("hfov_deg")) cfg.hfov_deg = s["hfov_deg"].get<double>();
      if (s.contains("camera_height")) cfg.camera_height = s["camera_height"].get<double>();
      if (s.contains("feature_dim")) cfg.feature_dim = s["feature_dim"].get<int>();
      if (s.contains("feature_noise_sigma")) {
        cfg.feature_noise_sigma = s["feature_noise_sigma"].get<double>();
      }
      if (s.contains("dropout_rate")) cfg.dropout_rate = s["dropout_rate"].get<double>();
      if (s.contains("with_masks")) cfg.with_masks = s["with_masks"].get<bool>();
    } catch (const json::exception& e) {
      boxlift::fail(ErrorCode::kSchema, "config synth: " + std::string(e.what()));
    }
  }
  if (global.seed) {
    cfg.seed = *global.seed;
  }
  return cfg;
}

boxlift::PipelineConfig pipeline_config(const json& config, const GlobalOptions& global) {
  boxlift::PipelineConfig cfg;
  if (config.contains("pipeline")) {
    const json& p = config["pipeline"];
    check_known_keys(p,
                     {"lift_nms_iou", "temporal_enabled", "spatial_enabled", "ground_margin",
                      "cluster_epsilon", "min_cluster", "far_distance", "nms_iou", "tau",
                      "total_range", "placements_per_frame", "use_2d", "use_priors",
                      "truncated_ap"},
                     "pipeline");
    try {
      if (p.contains("lift_nms_iou")) cfg.lift_nms_iou = p["lift_nms_iou"].get<double>();
      if (p.contains("temporal_enabled")) {
        cfg.temporal_enabled = p["temporal_enabled"].get<bool>();
      }
      if (p.contains("spatial_enabled")) cfg.spatial_enabled = p["spatial_enabled"].get<bool>();
      if (p.contains("ground_margin")) cfg.lift.ground_margin = p["ground_margin"].get<double>();
      if (p.contains("cluster_epsilon")) {
        cfg.lift.cluster_epsilon = p["cluster_epsilon"].get<double>();
      }
      if (p.contains("min_cluster")) cfg.lift.min_cluster = p["min_cluster"].get<int>();
      if (p.contains("far_distance")) cfg.temporal.far_distance = p["far_distance"].get<double>();
      if (p.contains("nms_iou")) cfg.temporal.nms_iou = p["nms_iou"].get<double>();
      if (p.contains("tau")) cfg.spatial.tau = p["tau"].get<double>();
      if (p.contains("total_range")) cfg.spatial.total_range = p["total_range"].get<double>();
      if (p.contains("placements_per_frame")) {
        cfg.spatial.placements_per_frame = p["placements_per_frame"].get<int>();
      }
      if (p.contains("use_2d")) cfg.label.use_2d = p["use_2d"].get<bool>();
      if (p.contains("use_priors")) cfg.label.use_priors = p["use_priors"].get<bool>();
      if (p.contains("truncated_ap")) cfg.eval.truncated_ap = p["truncated_ap"].get<bool>();
    } catch (const json::exception& e) {
      boxlift::fail(ErrorCode::kSchema, "config pipeline: " + std::string(e.what()));
    }
  }
  if (global.seed) {
    cfg.seed = *global.seed;
  }
  cfg.threads = global.threads;
  return cfg;
}

json box_to_json(const boxlift::Box3D& b) {
  json out = {{"center", {b.center.x, b.center.y, b.center.z}},
              {"w", b.w},
              {"l", b.l},
              {"h", b.h},
              {"score", b.score}};
  if (b.class_id) {
    out["class_id"] = *b.class_id;
  }
  return out;
}

json labeled_to_json(const boxlift::LabeledBox& b) {
  json out = box_to_json(b.box);
  out["class"] = b.class_name;
  out["confidence"] = b.confidence;
  out["provenance"] = boxlift::provenance_name(b.provenance);
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    boxlift::fail(ErrorCode::kIo, "cannot open " + path.string());
  }
  out << text;
  if (!out) {
    boxlift::fail(ErrorCode::kIo, "write failed for " + path.string());
  }
}

void write_json(const std::filesystem::path& path, const json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

// Serializes one slice of the pipeline result per stage-oriented subcommand.
json stage_json(const boxlift::PipelineResult& result, const std::string& stage) {
  json frames = json::array();
  for (const auto& f : result.frames) {
    json entry = {{"frame_id", f.frame_id}};
    json boxes = json::array();
    if (stage == "lift") {
      for (const auto& b : f.lifted) {
        boxes.push_back(box_to_json(b));
      }
    } else if (stage == "temporal") {
      for (const auto& b : f.refined) {
        boxes.push_back(box_to_json(b));
      }
    } else if (stage == "labels") {
      for (const auto& b : f.labeled) {
        boxes.push_back(labeled_to_json(b));
      }
    } else {  // augment
      for (const auto& p : f.placed) {
        json placed = box_to_json(p.box);
        placed["ratio"] = p.ratio;
        placed["bank_index"] = p.bank_index;
        placed["n_points"] = p.points.size();
        boxes.push_back(placed);
      }
    }
    entry["boxes"] = boxes;
    frames.push_back(entry);
  }
  return json{{"stage", stage}, {"frames", frames}};
}

int dispatch(const std::string& command, const GlobalOptions& global,
             const std::string& scene_dir, int bev_frame) {
  const json config = load_config(global.config_path);
  const std::filesystem::path out_dir(global.out_dir);

  if (command == "synth") {
    const boxlift::Scene scene = boxlift::generate_synthetic(synth_config(config, global));
    const auto dir = out_dir / "scene";
    boxlift::save_scene(scene, dir.string());
    std::cout << "wrote " << dir.string() << " (" << scene.frames.size() << " frames)\n";
    return 0;
  }

  const boxlift::Scene scene = boxlift::load_scene(scene_dir);
  boxlift::PipelineConfig cfg = pipeline_config(config, global);

  if (command == "bev") {
    if (bev_frame < 0 || static_cast<std::size_t>(bev_frame) >= scene.frames.size()) {
      boxlift::fail(ErrorCode::kDomain, "bev: frame index out of range");
    }
    const boxlift::PipelineResult result = run_pipeline(scene, cfg);
    char name[64];
    std::snprintf(name, sizeof(name), "bev_%06d.svg", bev_frame);
    const auto path = out_dir / name;
    std::filesystem::create_directories(out_dir);
    boxlift::export_bev_svg(scene.frames[static_cast<std::size_t>(bev_frame)],
                            result.frames[static_cast<std::size_t>(bev_frame)].labeled,
                            scene.frames[static_cast<std::size_t>(bev_frame)].gt_boxes,
                            path.string());
    std::cout << "wrote " << path.string() << "\n";
    return 0;
  }

  if (command == "augment") {
    cfg.spatial_enabled = true;
  }

  const boxlift::PipelineResult result = run_pipeline(scene, cfg);

  if (command == "lift" || command == "temporal" || command == "labels" ||
      command == "augment") {
    const auto path = out_dir / (command + ".json");
    write_json(path, stage_json(result, command));
    std::cout << "wrote " << path.string() << "\n";
    return 0;
  }

  if (command == "eval") {
    if (!result.report) {
      boxlift::fail(ErrorCode::kNoGroundTruth, "eval: scene has no ground truth");
    }
    write_text(out_dir / "report.txt", render_report_text(*result.report));
    write_text(out_dir / "report.csv", render_report_csv(*result.report));
    std::cout << render_report_text(*result.report);
    return 0;
  }

  // run: every artifact in one pass.
  write_json(out_dir / "lift.json", stage_json(result, "lift"));
  write_json(out_dir / "temporal.json", stage_json(result, "temporal"));
  write_json(out_dir / "labels.json", stage_json(result, "labels"));
  if (cfg.spatial_enabled) {
    write_json(out_dir / "augment.json", stage_json(result, "augment"));
  }
  if (result.report) {
    write_text(out_dir / "report.txt", render_report_text(*result.report));
    write_text(out_dir / "report.csv", render_report_csv(*result.report));
  }
  std::cout << "wrote pipeline outputs to " << out_dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pseudo-label geometry pipeline"};
  app.require_subcommand(1);

  GlobalOptions global;
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "base RNG seed override");
  app.add_option("--config", global.config_path, "JSON config file");
  app.add_option("--out-dir", global.out_dir, "output directory (default .)");
  app.add_option("--threads", global.threads, "worker threads for per-frame stages")
      ->check(CLI::PositiveNumber);

  std::string scene_dir;
  int bev_frame = 0;

  auto* synth = app.add_subcommand("synth", "generate a synthetic scene container");
  auto add_scene_option = [&scene_dir](CLI::App* cmd) {
    cmd->add_option("--scene", scene_dir, "scene container directory")->required();
  };
  add_scene_option(app.add_subcommand("lift", "2D detections to 3D boxes, per frame"));
  add_scene_option(app.add_subcommand("temporal", "lift plus temporal refinement"));
  add_scene_option(app.add_subcommand("augment", "pipeline with object-bank placements"));
  add_scene_option(app.add_subcommand("labels", "full pseudo-label output"));
  add_scene_option(app.add_subcommand("eval", "pipeline plus metric report"));
  add_scene_option(app.add_subcommand("run", "all stages, all artifacts"));
  auto* bev = app.add_subcommand("bev", "render one frame to SVG");
  add_scene_option(bev);
  bev->add_option("--frame", bev_frame, "frame index to render");

  CLI11_PARSE(app, argc, argv);
  if (seed_opt->count() > 0) {
    global.seed = seed_value;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  (void)synth;
  try {
    return dispatch(command, global, scene_dir, bev_frame);
  } catch (const Error& e) {
    const json diagnostic = {
        {"error", {{"code", boxlift::error_code_name(e.code())}, {"message", e.what()}}}};
    std::cerr << diagnostic.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    const json diagnostic = {{"error", {{"code", "unexpected"}, {"message", e.what()}}}};
    std::cerr << diagnostic.dump() << "\n";
    return 1;
  }
}
