#pragma once

#include <string>
#include <vector>

namespace boxlift {

// Embedding vector attached to detections and text prompts. Values are kept
// as doubles in memory; the on-disk payload is float32, so anything loaded
// from a container round-trips exactly.
struct FeatureVec {
  std::vector<double> values;

  std::size_t dim() const { return values.size(); }
};

double dot(const FeatureVec& a, const FeatureVec& b);       // throws kShapeMismatch on dim mismatch
double cosine_similarity(const FeatureVec& a, const FeatureVec& b);  // throws kZeroVector

// Per-class text embeddings, one entry per vocabulary word.
struct TextCatalog {
  struct Entry {
    std::string name;
    FeatureVec embedding;
  };

  std::vector<Entry> entries;
};

}  // namespace boxlift
