#include <benchmark/benchmark.h>

#include <random>

#include "boxlift/geometry.hpp"
#include "boxlift/lift.hpp"
#include "boxlift/losses.hpp"
#include "boxlift/synth.hpp"

using namespace boxlift;

namespace {

Box3D random_box(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> center(-5.0, 5.0);
  std::uniform_real_distribution<double> dim(0.5, 4.0);
  Box3D b;
  b.center = {center(rng), center(rng), center(rng)};
  b.w = dim(rng);
  b.l = dim(rng);
  b.h = dim(rng);
  return b;
}

void bm_iou_3d(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::vector<std::pair<Box3D, Box3D>> pairs;
  for (int i = 0; i < 1024; ++i) {
    pairs.emplace_back(random_box(rng), random_box(rng));
  }
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& [a, b] = pairs[i++ & 1023];
    benchmark::DoNotOptimize(iou_3d(a, b));
  }
}
BENCHMARK(bm_iou_3d);

void bm_region_grow(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> coord(0.0, 30.0);
  PointCloud cloud;
  Cluster seeds;
  for (std::size_t i = 0; i < n; ++i) {
    cloud.points.push_back({coord(rng), coord(rng), coord(rng) * 0.1});
    seeds.indices.push_back(static_cast<std::int32_t>(i));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(region_grow(cloud, seeds, 0.5, 5));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_region_grow)->Range(512, 8192)->Complexity();

void bm_hungarian(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> c(0.0, 10.0);
  std::vector<double> cost(n * n);
  for (double& v : cost) {
    v = c(rng);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(hungarian_match(cost, n, n));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_hungarian)->Range(8, 128)->Complexity();

void bm_lift_frame(benchmark::State& state) {
  SynthConfig cfg;
  cfg.seed = 4;
  cfg.n_frames = 1;
  cfg.objects_per_class = {{"car", 6}, {"pedestrian", 4}};
  cfg.ground_points = 8000;
  const Scene scene = generate_synthetic(cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lift_frame(scene.frames[0], LiftConfig{}));
  }
}
BENCHMARK(bm_lift_frame);

}  // namespace

BENCHMARK_MAIN();
