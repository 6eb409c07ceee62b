#pragma once

#include "coastline/raster.hpp"

#include <span>

namespace coastline {

/// Fuse per-model coastlines into one path by weighted averaging.
/// At each index the weights are renormalized over the models that are
/// present there; an index where no model is present stays absent.
/// Throws on empty input, mixed orientations, length mismatch, a weight
/// count that differs from the path count, negative weights, or an
/// all-zero weight vector.
CoastlinePath ensemble_paths(std::span<const CoastlinePath> paths, std::span<const double> weights);

/// Linearly interpolate coordinates across absent runs that have present
/// neighbors on both sides. Leading and trailing absent runs are kept absent.
CoastlinePath interpolate_gaps(const CoastlinePath& path);

/// Rasterize a path into a mask and restore 8-connectivity: wherever two
/// consecutive present coordinates differ by more than one pixel, the
/// intermediate pixels are added at the later index. With interpolate_absent
/// set, interior absent runs are filled via interpolate_gaps first.
/// secondary_extent is the mask size along the secondary axis (height for
/// landscape paths, width for portrait ones); coordinates are rounded half
/// away from zero and clamped to the extent.
CoastMask fill_gaps(const CoastlinePath& path, int secondary_extent, bool interpolate_absent = true);

} // namespace coastline
