#pragma once

#include <string>

#include "boxlift/geometry.hpp"

namespace boxlift {

// Records which path produced a box's final class: the 3D feature, the
// matched 2D detection's feature, or the size-prior fallback.
enum class Provenance {
  kFrom3D,
  kFrom2D,
  kFromPrior,
};

const char* provenance_name(Provenance p);

struct LabeledBox {
  Box3D box;
  std::string class_name;
  double confidence = 0.0;
  Provenance provenance = Provenance::kFrom3D;
};

}  // namespace boxlift
