#include "coastline/synth.hpp"

#include "coastline/ensemble.hpp"
#include "coastline/rng.hpp"

#include <algorithm>
#include <cmath>

namespace coastline {

double SceneConfig::curve_at(int x) const {
    double y = base;
    for (const SineComponent& w : waves)
        y += w.amplitude * std::sin(2.0 * 3.141592653589793238 * w.frequency * x / width + w.phase);
    return y;
}

void SceneConfig::validate() const {
    if (width < 1 || height < 2)
        throw Error("SceneConfig: scene must be at least 1x2");
    if (land_mean < 0.0 || land_mean > 65535.0 || sea_mean < 0.0 || sea_mean > 65535.0)
        throw Error("SceneConfig: class means must lie in [0, 65535]");
    if (speckle_looks < 1)
        throw Error("SceneConfig: speckle_looks must be >= 1");
    if (point_stride < 1)
        throw Error("SceneConfig: point_stride must be >= 1");
    for (const Rect& r : nodata_rects)
        if (r.w < 1 || r.h < 1 || r.x < 0 || r.y < 0 || r.x + r.w > width || r.y + r.h > height)
            throw Error("SceneConfig: no-data rect outside the scene");
    for (int x = 0; x < width; ++x) {
        double y = curve_at(x);
        if (!(y >= 0.0 && y <= height - 1.0))
            throw Error("SceneConfig: coastline leaves the image at column " +
                        std::to_string(x) + " (y = " + std::to_string(y) + ")");
    }
}

Scene generate_scene(const SceneConfig& cfg) {
    cfg.validate();
    Scene scene;

    // True coastline as a dense path; the coast mask is its 8-connected
    // rasterization.
    CoastlinePath path(Orientation::landscape, cfg.width);
    for (int x = 0; x < cfg.width; ++x)
        path.entries[static_cast<size_t>(x)] = PathEntry{cfg.curve_at(x), true};
    scene.coast = fill_gaps(path, cfg.height);

    scene.classes = ClassMap(cfg.width, cfg.height);
    for (int x = 0; x < cfg.width; ++x) {
        int r = static_cast<int>(std::lround(cfg.curve_at(x)));
        for (int y = 0; y < cfg.height; ++y) {
            bool below = y >= r;
            bool land = cfg.land_side == LandSide::below ? below : !below;
            scene.classes.at(x, y) = land ? 2 : 0;
        }
    }

    scene.image = RasterImage(cfg.width, cfg.height);
    Rng rng(cfg.seed, 0);
    double looks = cfg.speckle_looks;
    for (int y = 0; y < cfg.height; ++y)
        for (int x = 0; x < cfg.width; ++x) {
            double mean = scene.classes.at(x, y) == 2 ? cfg.land_mean : cfg.sea_mean;
            double v = mean * (rng.gamma(looks) / looks);
            scene.image.at(x, y) =
                static_cast<uint16_t>(std::clamp(std::llround(v), 0ll, 65535ll));
        }

    for (const Rect& r : cfg.nodata_rects)
        for (int y = r.y; y < r.y + r.h; ++y)
            for (int x = r.x; x < r.x + r.w; ++x) {
                scene.classes.at(x, y) = 1;
                scene.image.at(x, y) = 0;
            }

    for (int x = 0; x < cfg.width; x += cfg.point_stride)
        scene.points.push_back(EvaluationPoint{static_cast<double>(x), cfg.curve_at(x)});

    return scene;
}

} // namespace coastline
