#pragma once

#include <string>
#include <vector>

namespace boxlift {

// Per-class average box dimensions in meters, used to gate pseudo boxes and
// to recalibrate labels. Class names are canonical lowercase identifiers
// ("traffic_cone", not "Traffic Cone").
struct SizePrior {
  std::string class_name;
  double w = 0.0;
  double l = 0.0;
  double h = 0.0;
};

// The ten-class table this repo ships. data/size_priors.json carries the same
// values; a test keeps the two in sync.
const std::vector<SizePrior>& builtin_size_priors();

std::vector<SizePrior> load_size_priors(const std::string& path);
void save_size_priors(const std::string& path, const std::vector<SizePrior>& priors);

}  // namespace boxlift
