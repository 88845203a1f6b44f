#include "boxlift/feature.hpp"

#include <cmath>

#include "boxlift/errors.hpp"

namespace boxlift {

double dot(const FeatureVec& a, const FeatureVec& b) {
  if (a.dim() != b.dim()) {
    fail(ErrorCode::kShapeMismatch, "feature dot: dimension mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    sum += a.values[i] * b.values[i];
  }
  return sum;
}

double cosine_similarity(const FeatureVec& a, const FeatureVec& b) {
  const double ab = dot(a, b);
  const double na = std::sqrt(dot(a, a));
  const double nb = std::sqrt(dot(b, b));
  if (na == 0.0 || nb == 0.0) {
    fail(ErrorCode::kZeroVector, "cosine_similarity: zero-norm feature");
  }
  return ab / (na * nb);
}

}  // namespace boxlift
