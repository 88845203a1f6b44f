#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "boxlift/scene.hpp"

namespace boxlift {

// Synthetic scene generator. Plants static prior-sized objects on a flat
// ground plane, drives a straight ego trajectory through them and renders
// per-camera ideal 2D detections with catalog-derived features. Everything is
// drawn from one seeded generator, so a fixed seed gives a byte-identical
// scene.
struct SynthConfig {
  std::uint64_t seed = 1;
  int n_frames = 20;
  double frame_dt = 0.5;     // seconds between sweeps
  double ego_speed = 5.0;    // m/s along global +x
  double lidar_range = 54.0; // objects beyond this carry no points and no GT

  // Objects per class; classes must exist in the size-prior table. Planted
  // dimensions jitter around the prior by +/- size_jitter (relative).
  std::map<std::string, int> objects_per_class{
      {"car", 6}, {"pedestrian", 6}, {"truck", 5}, {"barrier", 5}, {"motorcycle", 4},
      {"traffic_cone", 4},
  };
  double size_jitter = 0.05;

  // Point budget: expected count for an object at 10 m; actual counts follow
  // a Poisson draw of that budget scaled by 1/range^2. Far objects need to
  // stay connected under the default clustering epsilon, which puts a floor
  // on this: around 1e3 the far half of the scene dissolves into fragments.
  double points_per_object_10m = 3500.0;
  int ground_points = 4000;
  double ground_noise_sigma = 0.01;

  // Camera ring: n_cameras spaced evenly in azimuth, each with hfov_deg.
  int n_cameras = 6;
  int image_width = 1600;
  int image_height = 900;
  double hfov_deg = 70.0;
  double camera_height = 1.8;  // sensor height above ground, also the LiDAR's

  int feature_dim = 16;
  double feature_noise_sigma = 0.05;  // per-component noise on copied embeddings

  // Fraction of objects whose 2D detections vanish on odd-numbered frames;
  // exercises temporal recovery.
  double dropout_rate = 0.0;

  bool with_masks = false;  // also emit rectangular instance masks
};

Scene generate_synthetic(const SynthConfig& cfg);

}  // namespace boxlift
