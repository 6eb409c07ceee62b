#pragma once

#include <vector>

#include "coastline/raster.hpp"

namespace coastline {

/// Exact squared Euclidean distance to the nearest set pixel, per pixel,
/// Felzenszwalb-Huttenlocher two-pass transform. An empty mask yields
/// +infinity everywhere.
std::vector<double> distance_transform_squared(const CoastMask& mask);

} // namespace coastline
