#include "boxlift/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "boxlift/errors.hpp"
#include "boxlift/semantics.hpp"

namespace boxlift {

namespace {

constexpr double kBaseTimestamp = 1000.0;
constexpr int kPlantRetries = 10;
constexpr double kMinLateral = 2.0;   // keep the corridor around the ego path clear
constexpr double kMaxLateral = 28.0;
constexpr double kPointBudgetCap = 4.0;  // cap the 1/r^2 growth at this multiple

// The volatile store blocks the vectorizer from folding the float round trip
// away (observed with GCC 11 at -O3), which would break bit-exact reloads.
double quantize_f32(double v) {
  volatile float f = static_cast<float>(v);
  return static_cast<double>(f);
}

Vec3 quantize_f32(const Vec3& v) {
  return {quantize_f32(v.x), quantize_f32(v.y), quantize_f32(v.z)};
}

struct PlantedObject {
  Box3D box;  // global frame, bottom resting on z = 0
  std::string class_name;
  std::size_t catalog_index = 0;
};

// Uniform point on the box surface, bottom face excluded (a roof-mounted
// sensor never sees the underside).
Vec3 sample_surface_point(const Box3D& box, std::mt19937_64& rng) {
  const double top = box.l * box.w;
  const double side_x = box.l * box.h;  // faces with outward normal +-y
  const double side_y = box.w * box.h;  // faces with outward normal +-x
  const double total = top + 2.0 * side_x + 2.0 * side_y;
  std::uniform_real_distribution<double> pick(0.0, total);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double face = pick(rng);
  const double a = unit(rng);
  const double b = unit(rng);
  Vec3 p = box.center;
  if (face < top) {
    p.x += (a - 0.5) * box.l;
    p.y += (b - 0.5) * box.w;
    p.z += 0.5 * box.h;
  } else if (face < top + 2.0 * side_x) {
    const double sign = face < top + side_x ? 1.0 : -1.0;
    p.x += (a - 0.5) * box.l;
    p.y += sign * 0.5 * box.w;
    p.z += (b - 0.5) * box.h;
  } else {
    const double sign = face < top + 2.0 * side_x + side_y ? 1.0 : -1.0;
    p.x += sign * 0.5 * box.l;
    p.y += (a - 0.5) * box.w;
    p.z += (b - 0.5) * box.h;
  }
  return p;
}

}  // namespace

Scene generate_synthetic(const SynthConfig& cfg) {
  if (cfg.n_frames <= 0 || cfg.n_cameras <= 0) {
    fail(ErrorCode::kDomain, "generate_synthetic: need at least one frame and one camera");
  }
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Scene scene;
  scene.scene_id = "synth-" + std::to_string(cfg.seed);
  scene.priors = builtin_size_priors();

  // Full-vocabulary catalog: random unit embeddings, one per prior class.
  for (const SizePrior& prior : scene.priors) {
    TextCatalog::Entry entry;
    entry.name = prior.class_name;
    entry.embedding.values.resize(static_cast<std::size_t>(cfg.feature_dim));
    double norm2 = 0.0;
    for (double& v : entry.embedding.values) {
      v = gauss(rng);
      norm2 += v * v;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& v : entry.embedding.values) {
      v = quantize_f32(v * inv);
    }
    scene.catalog.entries.push_back(std::move(entry));
  }
  const auto catalog_index_of = [&scene](const std::string& name) {
    for (std::size_t i = 0; i < scene.catalog.entries.size(); ++i) {
      if (scene.catalog.entries[i].name == name) {
        return i;
      }
    }
    fail(ErrorCode::kSchema, "generate_synthetic: class without prior: " + name);
  };

  // Plant objects along the driven corridor, non-overlapping, resting on the
  // global ground plane z = 0.
  const double travel = cfg.ego_speed * cfg.frame_dt * static_cast<double>(cfg.n_frames - 1);
  const double x_lo = 5.0;
  const double x_hi = travel + cfg.lidar_range - 4.0;
  std::vector<PlantedObject> objects;
  for (const auto& [class_name, count] : cfg.objects_per_class) {
    const auto prior_it =
        std::find_if(scene.priors.begin(), scene.priors.end(),
                     [&](const SizePrior& p) { return p.class_name == class_name; });
    if (prior_it == scene.priors.end()) {
      fail(ErrorCode::kSchema, "generate_synthetic: class without prior: " + class_name);
    }
    for (int i = 0; i < count; ++i) {
      for (int attempt = 0; attempt < kPlantRetries; ++attempt) {
        PlantedObject obj;
        obj.class_name = class_name;
        obj.catalog_index = catalog_index_of(class_name);
        const auto jitter = [&] { return 1.0 + cfg.size_jitter * (2.0 * unit(rng) - 1.0); };
        obj.box.w = prior_it->w * jitter();
        obj.box.l = prior_it->l * jitter();
        obj.box.h = prior_it->h * jitter();
        obj.box.center.x = x_lo + (x_hi - x_lo) * unit(rng);
        const double lateral = kMinLateral + (kMaxLateral - kMinLateral) * unit(rng);
        obj.box.center.y = unit(rng) < 0.5 ? lateral : -lateral;
        obj.box.center.z = 0.5 * obj.box.h;
        bool collides = false;
        for (const PlantedObject& other : objects) {
          if (iou_3d(obj.box, other.box) > 0.0) {
            collides = true;
            break;
          }
        }
        if (!collides) {
          objects.push_back(std::move(obj));
          break;
        }
      }
    }
  }

  // Objects whose detections vanish on odd frames.
  std::vector<std::size_t> object_order(objects.size());
  for (std::size_t i = 0; i < object_order.size(); ++i) {
    object_order[i] = i;
  }
  std::shuffle(object_order.begin(), object_order.end(), rng);
  std::vector<char> dropped(objects.size(), 0);
  const std::size_t n_dropped =
      static_cast<std::size_t>(std::round(cfg.dropout_rate * static_cast<double>(objects.size())));
  for (std::size_t i = 0; i < n_dropped && i < object_order.size(); ++i) {
    dropped[object_order[i]] = 1;
  }

  // Shared camera ring.
  std::vector<CameraModel> cameras;
  const double focal = (static_cast<double>(cfg.image_width) / 2.0) /
                       std::tan(cfg.hfov_deg * std::numbers::pi / 180.0 / 2.0);
  for (int c = 0; c < cfg.n_cameras; ++c) {
    const double yaw = 2.0 * std::numbers::pi * static_cast<double>(c) /
                       static_cast<double>(cfg.n_cameras);
    CameraModel cam;
    cam.camera_id = c;
    cam.intrinsics = {focal, focal, static_cast<double>(cfg.image_width) / 2.0,
                      static_cast<double>(cfg.image_height) / 2.0, cfg.image_width,
                      cfg.image_height};
    // Rows are the camera basis in LiDAR coordinates: x right, y down,
    // z forward along the mount azimuth.
    const double cy = std::cos(yaw);
    const double sy = std::sin(yaw);
    cam.lidar_to_camera.rotation = {sy, -cy, 0.0, 0.0, 0.0, -1.0, cy, sy, 0.0};
    cam.lidar_to_camera.translation = {0.0, 0.0, 0.0};
    cameras.push_back(cam);
  }

  for (int f = 0; f < cfg.n_frames; ++f) {
    Frame frame;
    frame.frame_id = f;
    frame.timestamp = kBaseTimestamp + cfg.frame_dt * static_cast<double>(f);
    frame.ego_pose.timestamp = frame.timestamp;
    frame.ego_pose.ego_to_global.translation = {
        cfg.ego_speed * cfg.frame_dt * static_cast<double>(f), 0.0, 0.0};
    frame.ego_pose.lidar_to_ego.translation = {0.0, 0.0, cfg.camera_height};
    frame.cameras = cameras;
    frame.detections2d.resize(cameras.size());

    const RigidTransform global_to_lidar =
        invert(compose(frame.ego_pose.ego_to_global, frame.ego_pose.lidar_to_ego));

    // Ground disk around the ego.
    std::normal_distribution<double> ground_noise(0.0, cfg.ground_noise_sigma);
    for (int i = 0; i < cfg.ground_points; ++i) {
      const double r = cfg.lidar_range * std::sqrt(unit(rng));
      const double phi = 2.0 * std::numbers::pi * unit(rng);
      const Vec3 p{r * std::cos(phi), r * std::sin(phi),
                   -cfg.camera_height + ground_noise(rng)};
      frame.points.points.push_back(quantize_f32(p));
    }

    // Object surfaces, point budget falling off with 1/range^2.
    std::vector<std::pair<std::size_t, Box3D>> in_range;  // (object index, box in lidar frame)
    for (std::size_t oi = 0; oi < objects.size(); ++oi) {
      Box3D box = objects[oi].box;
      box.center = apply(global_to_lidar, box.center);
      const double range = horizontal_range(box.center);
      if (range > cfg.lidar_range || range < 1.0) {
        continue;
      }
      in_range.emplace_back(oi, box);
      const double falloff = std::min(kPointBudgetCap, (10.0 * 10.0) / (range * range));
      std::poisson_distribution<int> n_points(cfg.points_per_object_10m * falloff);
      const int count = n_points(rng);
      for (int i = 0; i < count; ++i) {
        frame.points.points.push_back(quantize_f32(sample_surface_point(box, rng)));
      }
    }

    // Ground truth and ideal per-camera detections for everything in range.
    for (const auto& [oi, box] : in_range) {
      LabeledBox gt;
      gt.box = box;
      gt.class_name = objects[oi].class_name;
      gt.confidence = 1.0;
      frame.gt_boxes.push_back(gt);
    }
    for (std::size_t c = 0; c < cameras.size(); ++c) {
      for (const auto& [oi, box] : in_range) {
        if (dropped[oi] && f % 2 == 1) {
          continue;
        }
        std::optional<Box2D> det =
            project_box3d_to_image(box, cameras[c].lidar_to_camera, cameras[c].intrinsics);
        if (!det) {
          continue;
        }
        det->score = 0.75 + 0.25 * unit(rng);
        det->feature_id = static_cast<std::int32_t>(frame.features2d.size());

        FeatureVec feature = scene.catalog.entries[objects[oi].catalog_index].embedding;
        for (double& v : feature.values) {
          v = quantize_f32(v + cfg.feature_noise_sigma * gauss(rng));
        }
        frame.features2d.push_back(std::move(feature));

        if (cfg.with_masks) {
          SegMask mask;
          mask.camera_id = cameras[c].camera_id;
          mask.box_index = static_cast<std::int32_t>(frame.detections2d[c].size());
          mask.width = cfg.image_width;
          mask.height = cfg.image_height;
          mask.bitmap.assign(
              static_cast<std::size_t>(cfg.image_width) * static_cast<std::size_t>(cfg.image_height),
              0);
          const int x0 = std::max(0, static_cast<int>(std::floor(det->x_min)));
          const int x1 = std::min(cfg.image_width - 1, static_cast<int>(std::ceil(det->x_max)));
          const int y0 = std::max(0, static_cast<int>(std::floor(det->y_min)));
          const int y1 = std::min(cfg.image_height - 1, static_cast<int>(std::ceil(det->y_max)));
          for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
              mask.bitmap[static_cast<std::size_t>(y) * static_cast<std::size_t>(cfg.image_width) +
                          static_cast<std::size_t>(x)] = 1;
            }
          }
          frame.masks.push_back(std::move(mask));
        }
        frame.detections2d[c].push_back(*det);
      }
    }
    scene.frames.push_back(std::move(frame));
  }

  validate_scene(scene);
  return scene;
}

}  // namespace boxlift
