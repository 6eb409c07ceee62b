#include "coastline/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace coastline {

FloatRaster normalize_linear(const RasterImage& img) {
    FloatRaster out(img.width, img.height, 1);
    for (size_t i = 0; i < img.data.size(); ++i)
        out.data[i] = static_cast<float>(img.data[i] / 65535.0);
    return out;
}

FloatRaster normalize_log(const RasterImage& img, const PreprocessConfig& cfg) {
    cfg.validate();
    FloatRaster out(img.width, img.height, 1);
    double span = cfg.log_range_hi - cfg.log_range_lo;
    // 65536 distinct inputs only; precompute the transfer curve.
    std::vector<float> lut(65536);
    for (int f = 0; f < 65536; ++f) {
        double arg = std::max(static_cast<double>(f) * f + cfg.noise_coefficient, cfg.log_floor);
        double v = 10.0 * std::log10(arg);
        lut[static_cast<size_t>(f)] =
            static_cast<float>(std::clamp((v - cfg.log_range_lo) / span, 0.0, 1.0));
    }
    for (size_t i = 0; i < img.data.size(); ++i)
        out.data[i] = lut[img.data[i]];
    return out;
}

FloatRaster normalize(const RasterImage& img, const PreprocessConfig& cfg) {
    return cfg.mode == PreprocessConfig::Mode::linear ? normalize_linear(img)
                                                      : normalize_log(img, cfg);
}

FloatRaster encode_labels(const ClassMap& classes) {
    FloatRaster out(classes.width, classes.height, 3);
    for (size_t i = 0; i < classes.data.size(); ++i) {
        uint8_t cls = classes.data[i];
        if (cls > 2)
            throw Error("encode_labels: class value out of {0,1,2}");
        out.data[3 * i + cls] = 1.0f;
    }
    return out;
}

FloatRaster encode_labels(const ClassMap& classes, const CoastMask& coast,
                          const LabelSmoothingConfig& cfg) {
    if (classes.width != coast.width || classes.height != coast.height)
        throw Error("encode_labels: class map and coast mask dimensions differ");
    FloatRaster smoothed = smooth_labels(coast, cfg);
    FloatRaster out(classes.width, classes.height, 4);
    for (size_t i = 0; i < classes.data.size(); ++i) {
        uint8_t cls = classes.data[i];
        if (cls > 2)
            throw Error("encode_labels: class value out of {0,1,2}");
        out.data[4 * i + cls] = 1.0f;
        out.data[4 * i + 3] = smoothed.data[i];
    }
    return out;
}

namespace {

// Exact Chebyshev distance to the nearest set pixel; the L-inf ball grows
// one step per 8-neighbour sweep, so two chamfer passes suffice.
std::vector<int> chebyshev_distance(const CoastMask& mask) {
    int w = mask.width, h = mask.height;
    int inf = w + h + 2;
    std::vector<int> d(mask.data.size(), inf);
    for (size_t i = 0; i < mask.data.size(); ++i)
        if (mask.data[i])
            d[i] = 0;

    auto at = [&](int x, int y) -> int& { return d[static_cast<size_t>(y) * w + x]; };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int best = at(x, y);
            if (x > 0)
                best = std::min(best, at(x - 1, y) + 1);
            if (y > 0) {
                best = std::min(best, at(x, y - 1) + 1);
                if (x > 0)
                    best = std::min(best, at(x - 1, y - 1) + 1);
                if (x + 1 < w)
                    best = std::min(best, at(x + 1, y - 1) + 1);
            }
            at(x, y) = best;
        }
    }
    for (int y = h - 1; y >= 0; --y) {
        for (int x = w - 1; x >= 0; --x) {
            int best = at(x, y);
            if (x + 1 < w)
                best = std::min(best, at(x + 1, y) + 1);
            if (y + 1 < h) {
                best = std::min(best, at(x, y + 1) + 1);
                if (x + 1 < w)
                    best = std::min(best, at(x + 1, y + 1) + 1);
                if (x > 0)
                    best = std::min(best, at(x - 1, y + 1) + 1);
            }
            at(x, y) = best;
        }
    }
    return d;
}

} // namespace

FloatRaster smooth_labels(const CoastMask& coast, const LabelSmoothingConfig& cfg) {
    cfg.validate();
    std::vector<int> dist = chebyshev_distance(coast);
    FloatRaster out(coast.width, coast.height, 1);
    double denom = cfg.kernel_radius + 1.0;
    for (size_t i = 0; i < dist.size(); ++i) {
        double k = 1.0 - dist[i] / denom;
        out.data[i] = k > 0.0 ? static_cast<float>(cfg.peak * k) : 0.0f;
    }
    return out;
}

uint64_t count_unique_crops(int w, int h, int a, int b) {
    if (w < 1 || h < 1 || a < 1 || b < 1)
        throw Error("count_unique_crops: dimensions must be positive");
    if (a > w || b > h)
        throw Error("count_unique_crops: crop larger than image");
    return static_cast<uint64_t>(w - a) * static_cast<uint64_t>(h - b);
}

} // namespace coastline
