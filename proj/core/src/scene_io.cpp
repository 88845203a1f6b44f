#include "boxlift/scene_io.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "boxlift/errors.hpp"

namespace boxlift {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kSceneFormat = "boxlift.scene";
constexpr const char* kCatalogFormat = "boxlift.catalog";
constexpr int kFormatVersion = 1;

std::string frame_stem(std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%06zu", index);
  return buf;
}

// All bulk float data goes through little-endian float32. The writers target
// the usual little-endian hosts; the reader would need byte swapping on a
// big-endian machine, which this codebase does not support.
void write_f32(const std::string& path, const std::vector<float>& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    fail(ErrorCode::kIo, "cannot open for writing: " + path);
  }
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(float)));
  if (!out) {
    fail(ErrorCode::kIo, "short write: " + path);
  }
}

std::vector<float> read_f32(const std::string& path, std::size_t expected) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) {
    fail(ErrorCode::kIo, "cannot open: " + path);
  }
  const std::streamsize bytes = in.tellg();
  if (static_cast<std::size_t>(bytes) != expected * sizeof(float)) {
    fail(ErrorCode::kParse, "payload size mismatch: " + path + " holds " +
                                std::to_string(bytes) + " bytes, manifest expects " +
                                std::to_string(expected * sizeof(float)));
  }
  std::vector<float> data(expected);
  in.seekg(0);
  in.read(reinterpret_cast<char*>(data.data()), bytes);
  if (!in) {
    fail(ErrorCode::kParse, "short read: " + path);
  }
  return data;
}

json transform_to_json(const RigidTransform& t) {
  return {{"rotation", t.rotation},
          {"translation", {t.translation.x, t.translation.y, t.translation.z}}};
}

RigidTransform transform_from_json(const json& j) {
  RigidTransform t;
  const auto& rot = j.at("rotation");
  if (rot.size() != 9) {
    fail(ErrorCode::kSchema, "rotation must have 9 entries");
  }
  for (std::size_t i = 0; i < 9; ++i) {
    t.rotation[i] = rot[i].get<double>();
  }
  const auto& tr = j.at("translation");
  if (tr.size() != 3) {
    fail(ErrorCode::kSchema, "translation must have 3 entries");
  }
  t.translation = {tr[0].get<double>(), tr[1].get<double>(), tr[2].get<double>()};
  return t;
}

json box2d_to_json(const Box2D& b) {
  json j = {{"x_min", b.x_min}, {"y_min", b.y_min}, {"x_max", b.x_max},
            {"y_max", b.y_max}, {"score", b.score}};
  if (b.class_id) {
    j["class_id"] = *b.class_id;
  }
  if (b.feature_id) {
    j["feature_id"] = *b.feature_id;
  }
  return j;
}

Box2D box2d_from_json(const json& j) {
  Box2D b;
  b.x_min = j.at("x_min").get<double>();
  b.y_min = j.at("y_min").get<double>();
  b.x_max = j.at("x_max").get<double>();
  b.y_max = j.at("y_max").get<double>();
  b.score = j.at("score").get<double>();
  if (j.contains("class_id")) {
    b.class_id = j.at("class_id").get<std::int32_t>();
  }
  if (j.contains("feature_id")) {
    b.feature_id = j.at("feature_id").get<std::int32_t>();
  }
  return b;
}

json labeled_to_json(const LabeledBox& lb) {
  json j = {{"center", {lb.box.center.x, lb.box.center.y, lb.box.center.z}},
            {"w", lb.box.w},
            {"l", lb.box.l},
            {"h", lb.box.h},
            {"score", lb.box.score},
            {"class", lb.class_name},
            {"confidence", lb.confidence},
            {"provenance", provenance_name(lb.provenance)}};
  if (lb.box.class_id) {
    j["class_id"] = *lb.box.class_id;
  }
  return j;
}

Provenance provenance_from_string(const std::string& s) {
  if (s == "from_3d") return Provenance::kFrom3D;
  if (s == "from_2d") return Provenance::kFrom2D;
  if (s == "from_prior") return Provenance::kFromPrior;
  fail(ErrorCode::kSchema, "unknown provenance: " + s);
}

LabeledBox labeled_from_json(const json& j) {
  LabeledBox lb;
  const auto& c = j.at("center");
  lb.box.center = {c[0].get<double>(), c[1].get<double>(), c[2].get<double>()};
  lb.box.w = j.at("w").get<double>();
  lb.box.l = j.at("l").get<double>();
  lb.box.h = j.at("h").get<double>();
  lb.box.score = j.at("score").get<double>();
  if (j.contains("class_id")) {
    lb.box.class_id = j.at("class_id").get<std::int32_t>();
  }
  lb.class_name = j.at("class").get<std::string>();
  lb.confidence = j.at("confidence").get<double>();
  lb.provenance = provenance_from_string(j.at("provenance").get<std::string>());
  return lb;
}

}  // namespace

std::vector<std::int64_t> rle_encode(const std::vector<std::uint8_t>& bitmap) {
  std::vector<std::int64_t> runs;
  std::uint8_t current = 0;  // runs alternate starting from zeros
  std::int64_t length = 0;
  for (const std::uint8_t v : bitmap) {
    const std::uint8_t bit = v != 0 ? 1 : 0;
    if (bit == current) {
      ++length;
    } else {
      runs.push_back(length);
      current = bit;
      length = 1;
    }
  }
  runs.push_back(length);
  if (bitmap.empty()) {
    runs.clear();
  }
  return runs;
}

std::vector<std::uint8_t> rle_decode(const std::vector<std::int64_t>& runs, std::size_t size) {
  std::vector<std::uint8_t> bitmap;
  bitmap.reserve(size);
  std::uint8_t current = 0;
  for (const std::int64_t run : runs) {
    if (run < 0) {
      fail(ErrorCode::kParse, "rle_decode: negative run length");
    }
    bitmap.insert(bitmap.end(), static_cast<std::size_t>(run), current);
    current = current == 0 ? 1 : 0;
  }
  if (bitmap.size() != size) {
    fail(ErrorCode::kParse, "rle_decode: runs sum to " + std::to_string(bitmap.size()) +
                                ", expected " + std::to_string(size));
  }
  return bitmap;
}

void save_scene(const Scene& scene, const std::string& dir) {
  validate_scene(scene);
  std::error_code ec;
  fs::create_directories(fs::path(dir) / "points", ec);
  fs::create_directories(fs::path(dir) / "features", ec);
  if (ec) {
    fail(ErrorCode::kIo, "save_scene: cannot create " + dir + ": " + ec.message());
  }

  json manifest;
  manifest["format"] = kSceneFormat;
  manifest["version"] = kFormatVersion;
  manifest["scene_id"] = scene.scene_id;

  std::size_t feature_dim = 0;
  for (const Frame& f : scene.frames) {
    if (!f.features2d.empty()) {
      feature_dim = f.features2d.front().dim();
      break;
    }
  }
  if (feature_dim == 0 && !scene.catalog.entries.empty()) {
    feature_dim = scene.catalog.entries.front().embedding.dim();
  }
  manifest["feature_dim"] = feature_dim;

  manifest["catalog"] = json::array();
  for (const auto& entry : scene.catalog.entries) {
    manifest["catalog"].push_back({{"name", entry.name}, {"embedding", entry.embedding.values}});
  }
  manifest["priors"] = json::array();
  for (const SizePrior& p : scene.priors) {
    manifest["priors"].push_back({{"class", p.class_name}, {"w", p.w}, {"l", p.l}, {"h", p.h}});
  }

  manifest["frames"] = json::array();
  for (std::size_t fi = 0; fi < scene.frames.size(); ++fi) {
    const Frame& frame = scene.frames[fi];
    json jf;
    jf["frame_id"] = frame.frame_id;
    jf["timestamp"] = frame.timestamp;
    jf["ego_pose"] = {{"timestamp", frame.ego_pose.timestamp},
                      {"ego_to_global", transform_to_json(frame.ego_pose.ego_to_global)},
                      {"lidar_to_ego", transform_to_json(frame.ego_pose.lidar_to_ego)}};
    jf["cameras"] = json::array();
    for (const CameraModel& cam : frame.cameras) {
      jf["cameras"].push_back({{"camera_id", cam.camera_id},
                               {"intrinsics",
                                {{"fx", cam.intrinsics.fx},
                                 {"fy", cam.intrinsics.fy},
                                 {"cx", cam.intrinsics.cx},
                                 {"cy", cam.intrinsics.cy},
                                 {"width", cam.intrinsics.width},
                                 {"height", cam.intrinsics.height}}},
                               {"lidar_to_camera", transform_to_json(cam.lidar_to_camera)}});
    }

    const std::string stem = frame_stem(fi);
    jf["n_points"] = frame.points.size();
    jf["points_file"] = "points/" + stem + ".bin";
    std::vector<float> pts;
    pts.reserve(frame.points.size() * 3);
    for (const Vec3& p : frame.points.points) {
      pts.push_back(static_cast<float>(p.x));
      pts.push_back(static_cast<float>(p.y));
      pts.push_back(static_cast<float>(p.z));
    }
    write_f32((fs::path(dir) / "points" / (stem + ".bin")).string(), pts);

    jf["n_features"] = frame.features2d.size();
    if (!frame.features2d.empty()) {
      jf["features_file"] = "features/" + stem + ".bin";
      std::vector<float> feats;
      feats.reserve(frame.features2d.size() * feature_dim);
      for (const FeatureVec& f : frame.features2d) {
        for (const double v : f.values) {
          feats.push_back(static_cast<float>(v));
        }
      }
      write_f32((fs::path(dir) / "features" / (stem + ".bin")).string(), feats);
    }

    jf["detections2d"] = json::array();
    for (const auto& per_camera : frame.detections2d) {
      json cam_dets = json::array();
      for (const Box2D& det : per_camera) {
        cam_dets.push_back(box2d_to_json(det));
      }
      jf["detections2d"].push_back(std::move(cam_dets));
    }

    jf["masks"] = json::array();
    for (const SegMask& m : frame.masks) {
      jf["masks"].push_back({{"camera_id", m.camera_id},
                             {"box_index", m.box_index},
                             {"width", m.width},
                             {"height", m.height},
                             {"rle", rle_encode(m.bitmap)}});
    }

    jf["gt_boxes"] = json::array();
    for (const LabeledBox& gt : frame.gt_boxes) {
      jf["gt_boxes"].push_back(labeled_to_json(gt));
    }
    manifest["frames"].push_back(std::move(jf));
  }

  std::ofstream out(fs::path(dir) / "manifest.json");
  if (!out) {
    fail(ErrorCode::kIo, "save_scene: cannot write manifest in " + dir);
  }
  out << manifest.dump(2) << "\n";
  if (!out) {
    fail(ErrorCode::kIo, "save_scene: short manifest write in " + dir);
  }
}

Scene load_scene(const std::string& dir) {
  std::ifstream in(fs::path(dir) / "manifest.json");
  if (!in) {
    fail(ErrorCode::kIo, "load_scene: cannot open manifest in " + dir);
  }
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, "load_scene: manifest: " + std::string(e.what()));
  }

  Scene scene;
  try {
    if (manifest.at("format").get<std::string>() != kSceneFormat) {
      fail(ErrorCode::kVersion, "load_scene: not a scene container");
    }
    if (manifest.at("version").get<int>() != kFormatVersion) {
      fail(ErrorCode::kVersion, "load_scene: unsupported version " +
                                    std::to_string(manifest.at("version").get<int>()));
    }
    scene.scene_id = manifest.at("scene_id").get<std::string>();
    const std::size_t feature_dim = manifest.at("feature_dim").get<std::size_t>();

    for (const auto& entry : manifest.at("catalog")) {
      TextCatalog::Entry e;
      e.name = entry.at("name").get<std::string>();
      e.embedding.values = entry.at("embedding").get<std::vector<double>>();
      scene.catalog.entries.push_back(std::move(e));
    }
    for (const auto& item : manifest.at("priors")) {
      scene.priors.push_back({item.at("class").get<std::string>(), item.at("w").get<double>(),
                              item.at("l").get<double>(), item.at("h").get<double>()});
    }

    for (const auto& jf : manifest.at("frames")) {
      Frame frame;
      frame.frame_id = jf.at("frame_id").get<std::int64_t>();
      frame.timestamp = jf.at("timestamp").get<double>();
      const auto& pose = jf.at("ego_pose");
      frame.ego_pose.timestamp = pose.at("timestamp").get<double>();
      frame.ego_pose.ego_to_global = transform_from_json(pose.at("ego_to_global"));
      frame.ego_pose.lidar_to_ego = transform_from_json(pose.at("lidar_to_ego"));

      for (const auto& jc : jf.at("cameras")) {
        CameraModel cam;
        cam.camera_id = jc.at("camera_id").get<std::int32_t>();
        const auto& ji = jc.at("intrinsics");
        cam.intrinsics.fx = ji.at("fx").get<double>();
        cam.intrinsics.fy = ji.at("fy").get<double>();
        cam.intrinsics.cx = ji.at("cx").get<double>();
        cam.intrinsics.cy = ji.at("cy").get<double>();
        cam.intrinsics.width = ji.at("width").get<int>();
        cam.intrinsics.height = ji.at("height").get<int>();
        cam.lidar_to_camera = transform_from_json(jc.at("lidar_to_camera"));
        frame.cameras.push_back(std::move(cam));
      }

      const std::size_t n_points = jf.at("n_points").get<std::size_t>();
      const std::vector<float> pts = read_f32(
          (fs::path(dir) / jf.at("points_file").get<std::string>()).string(), n_points * 3);
      frame.points.points.reserve(n_points);
      for (std::size_t i = 0; i < n_points; ++i) {
        frame.points.points.push_back({static_cast<double>(pts[3 * i]),
                                       static_cast<double>(pts[3 * i + 1]),
                                       static_cast<double>(pts[3 * i + 2])});
      }

      const std::size_t n_features = jf.at("n_features").get<std::size_t>();
      if (n_features > 0) {
        const std::vector<float> feats = read_f32(
            (fs::path(dir) / jf.at("features_file").get<std::string>()).string(),
            n_features * feature_dim);
        frame.features2d.resize(n_features);
        for (std::size_t i = 0; i < n_features; ++i) {
          frame.features2d[i].values.reserve(feature_dim);
          for (std::size_t d = 0; d < feature_dim; ++d) {
            frame.features2d[i].values.push_back(static_cast<double>(feats[i * feature_dim + d]));
          }
        }
      }

      for (const auto& cam_dets : jf.at("detections2d")) {
        std::vector<Box2D> dets;
        for (const auto& jd : cam_dets) {
          dets.push_back(box2d_from_json(jd));
        }
        frame.detections2d.push_back(std::move(dets));
      }

      for (const auto& jm : jf.at("masks")) {
        SegMask m;
        m.camera_id = jm.at("camera_id").get<std::int32_t>();
        m.box_index = jm.at("box_index").get<std::int32_t>();
        m.width = jm.at("width").get<std::int32_t>();
        m.height = jm.at("height").get<std::int32_t>();
        m.bitmap = rle_decode(jm.at("rle").get<std::vector<std::int64_t>>(),
                              static_cast<std::size_t>(m.width) * static_cast<std::size_t>(m.height));
        frame.masks.push_back(std::move(m));
      }

      for (const auto& jg : jf.at("gt_boxes")) {
        frame.gt_boxes.push_back(labeled_from_json(jg));
      }
      scene.frames.push_back(std::move(frame));
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kSchema, "load_scene: " + std::string(e.what()));
  }

  validate_scene(scene);
  return scene;
}

TextCatalog load_catalog(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    fail(ErrorCode::kIo, "load_catalog: cannot open " + path);
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, "load_catalog: " + std::string(e.what()));
  }
  TextCatalog catalog;
  try {
    if (doc.at("format").get<std::string>() != kCatalogFormat) {
      fail(ErrorCode::kVersion, "load_catalog: not a catalog file");
    }
    if (doc.at("version").get<int>() != kFormatVersion) {
      fail(ErrorCode::kVersion, "load_catalog: unsupported version");
    }
    for (const auto& entry : doc.at("entries")) {
      TextCatalog::Entry e;
      e.name = entry.at("name").get<std::string>();
      e.embedding.values = entry.at("embedding").get<std::vector<double>>();
      catalog.entries.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kSchema, "load_catalog: " + std::string(e.what()));
  }
  return catalog;
}

void save_catalog(const std::string& path, const TextCatalog& catalog) {
  json doc;
  doc["format"] = kCatalogFormat;
  doc["version"] = kFormatVersion;
  doc["entries"] = json::array();
  for (const auto& entry : catalog.entries) {
    doc["entries"].push_back({{"name", entry.name}, {"embedding", entry.embedding.values}});
  }
  std::ofstream out(path);
  if (!out) {
    fail(ErrorCode::kIo, "save_catalog: cannot open " + path);
  }
  out << doc.dump(2) << "\n";
}

}  // namespace boxlift
