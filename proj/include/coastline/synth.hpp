#pragma once

#include "coastline/raster.hpp"
#include "coastline/resample.hpp"

#include <vector>

namespace coastline {

struct SineComponent {
    double amplitude = 0.0;
    double frequency = 1.0; // cycles across the image width
    double phase = 0.0;     // radians
};

enum class LandSide { above, below };

/// Synthetic SAR-like scene: a sinusoidal coastline y(x) = base + sum of
/// amplitude * sin(2*pi*frequency*x/width + phase) separating land from sea,
/// gamma-speckled intensities, optional no-data rectangles, and evaluation
/// points sampled on the true curve every point_stride columns.
struct SceneConfig {
    int width = 1024;
    int height = 768;
    double base = 384.0;
    std::vector<SineComponent> waves;
    LandSide land_side = LandSide::below;
    double land_mean = 9000.0;
    double sea_mean = 2500.0;
    int speckle_looks = 4;
    std::vector<Rect> nodata_rects;
    int point_stride = 64;
    uint64_t seed = 0;

    double curve_at(int x) const;
    void validate() const;
};

struct Scene {
    RasterImage image;
    ClassMap classes;
    CoastMask coast;
    std::vector<EvaluationPoint> points;
};

/// Deterministic under cfg.seed. The class map assigns land to the side of
/// the rounded curve given by land_side, the coast mask is the gap-filled
/// rasterized curve, intensities are class_mean * Gamma(looks)/looks clamped
/// to [0, 65535], and no-data rects override class and intensity last.
Scene generate_scene(const SceneConfig& cfg);

} // namespace coastline
