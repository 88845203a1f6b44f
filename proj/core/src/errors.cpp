#include "boxlift/errors.hpp"

namespace boxlift {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInsufficientPoints: return "insufficient_points";
    case ErrorCode::kNoHorizontalPlane: return "no_horizontal_plane";
    case ErrorCode::kEmptyInput: return "empty_input";
    case ErrorCode::kShapeMismatch: return "shape_mismatch";
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kEmptyPositiveSet: return "empty_positive_set";
    case ErrorCode::kZeroVector: return "zero_vector";
    case ErrorCode::kDegenerateRange: return "degenerate_range";
    case ErrorCode::kNoGroundTruth: return "no_ground_truth";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kSchema: return "schema";
    case ErrorCode::kVersion: return "version";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

}  // namespace boxlift
