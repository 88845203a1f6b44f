#pragma once

#include <string>
#include <vector>

#include "boxlift/labels.hpp"
#include "boxlift/scene.hpp"

namespace boxlift {

// Bird's-eye-view rendering of one frame: LiDAR points, predicted boxes with
// class tags, ground-truth outlines. Fixed 54 m extent, fixed formatting, so
// the same inputs always produce the same bytes.
std::string render_bev_svg(const Frame& frame, const std::vector<LabeledBox>& boxes,
                           const std::vector<LabeledBox>& gt);

void export_bev_svg(const Frame& frame, const std::vector<LabeledBox>& boxes,
                    const std::vector<LabeledBox>& gt, const std::string& path);

}  // namespace boxlift
