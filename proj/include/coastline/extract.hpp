#pragma once

#include "coastline/raster.hpp"

namespace coastline {

/// How to pick the browsing axis: automatic resolves to landscape when
/// width >= height.
enum class OrientationMode { automatic, landscape, portrait };

Orientation resolve_orientation(OrientationMode mode, int width, int height);

/// Per-pixel argmax of a 3-channel class probability map; ties go to the
/// lowest class index.
ClassMap argmax_classes(const FloatRaster& probs);

/// Coastline from a 3-class map: a pixel is coastline when its 3x3
/// neighbourhood (clipped at borders) of the argmax map contains both sea
/// and land, i.e. the neighbourhood class range spans 0..2.
CoastMask extract_softmax(const FloatRaster& probs);

/// Coastline from a single-channel map: one pixel per column (landscape)
/// or per row (portrait) at the maximum probability; ties go to the
/// smallest coordinate.
CoastMask extract_sigmoid(const FloatRaster& probs,
                          OrientationMode mode = OrientationMode::automatic);

/// Canonical per-column (or per-row) form of a mask: absent where the
/// column is empty, mean coordinate where several pixels are set.
CoastlinePath mask_to_path(const CoastMask& mask,
                           OrientationMode mode = OrientationMode::automatic);

} // namespace coastline
