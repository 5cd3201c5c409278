#pragma once

#include <string>

#include "extman/pipeline.hpp"

namespace extman {

// Two-panel SVG of a saved run: top view (x, y) and side view (x, z) with
// the wall, obstacles, the object outline at each segment end and the path
// of the object center. Output is byte-stable for identical inputs.
std::string trajectory_svg(const LoadedTrajectory& loaded);

void save_svg(const LoadedTrajectory& loaded, const std::string& path);

}  // namespace extman
