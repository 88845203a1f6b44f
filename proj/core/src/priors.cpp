#include "boxlift/priors.hpp"

#include <fstream>

#include <json.hpp>

#include "boxlift/errors.hpp"

namespace boxlift {

const std::vector<SizePrior>& builtin_size_priors() {
  // Average nuScenes dimensions (w, l, h) per class, meters.
  static const std::vector<SizePrior> kPriors = {
      {"truck", 2.52, 6.94, 2.85},
      {"pedestrian", 0.67, 0.73, 1.77},
      {"car", 1.96, 4.63, 1.74},
      {"traffic_cone", 0.41, 0.42, 1.08},
      {"motorcycle", 0.77, 2.11, 1.46},
      {"construction_vehicle", 2.82, 6.56, 3.20},
      {"trailer", 2.92, 12.28, 3.87},
      {"barrier", 2.51, 0.50, 0.99},
      {"bicycle", 0.61, 1.70, 1.30},
      {"bus", 2.95, 11.19, 3.49},
  };
  return kPriors;
}

std::vector<SizePrior> load_size_priors(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    fail(ErrorCode::kIo, "load_size_priors: cannot open " + path);
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, "load_size_priors: " + std::string(e.what()));
  }
  std::vector<SizePrior> out;
  try {
    for (const auto& item : doc.at("priors")) {
      SizePrior p;
      p.class_name = item.at("class").get<std::string>();
      p.w = item.at("w").get<double>();
      p.l = item.at("l").get<double>();
      p.h = item.at("h").get<double>();
      if (p.w <= 0.0 || p.l <= 0.0 || p.h <= 0.0) {
        fail(ErrorCode::kSchema, "load_size_priors: nonpositive dimension for " + p.class_name);
      }
      out.push_back(std::move(p));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kSchema, "load_size_priors: " + std::string(e.what()));
  }
  return out;
}

void save_size_priors(const std::string& path, const std::vector<SizePrior>& priors) {
  nlohmann::json doc;
  doc["priors"] = nlohmann::json::array();
  for (const SizePrior& p : priors) {
    doc["priors"].push_back({{"class", p.class_name}, {"w", p.w}, {"l", p.l}, {"h", p.h}});
  }
  std::ofstream out(path);
  if (!out) {
    fail(ErrorCode::kIo, "save_size_priors: cannot open " + path);
  }
  out << doc.dump(2) << "\n";
}

}  // namespace boxlift
