#include "boxlift/labels.hpp"

namespace boxlift {

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::kFrom3D: return "from_3d";
    case Provenance::kFrom2D: return "from_2d";
    case Provenance::kFromPrior: return "from_prior";
  }
  return "unknown";
}

}  // namespace boxlift
