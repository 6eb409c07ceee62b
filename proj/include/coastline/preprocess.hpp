#pragma once

#include <cstdint>

#include "coastline/raster.hpp"

namespace coastline {

struct PreprocessConfig {
    enum class Mode { linear, log };

    Mode mode = Mode::log;
    double noise_coefficient = -83.0; // added to the squared intensity
    double log_floor = 1.0;           // lower clamp on the log argument
    double log_range_lo = 0.0;        // dB span mapped onto [0,1]
    double log_range_hi = 96.33;

    void validate() const {
        if (log_floor <= 0.0)
            throw Error("PreprocessConfig: log_floor must be positive");
        if (log_range_hi <= log_range_lo)
            throw Error("PreprocessConfig: log range must satisfy hi > lo");
    }
};

struct LabelSmoothingConfig {
    int kernel_radius = 2; // pixels, Chebyshev
    double peak = 1.0;     // value on coastline pixels, in (0,1]

    void validate() const {
        if (kernel_radius < 0)
            throw Error("LabelSmoothingConfig: kernel_radius must be >= 0");
        if (peak <= 0.0 || peak > 1.0)
            throw Error("LabelSmoothingConfig: peak must be in (0,1]");
    }
};

/// out = f / 65535, in [0,1].
FloatRaster normalize_linear(const RasterImage& img);

/// v = 10*log10(max(f^2 + c, floor)); out = clamp((v - lo)/(hi - lo), 0, 1).
FloatRaster normalize_log(const RasterImage& img, const PreprocessConfig& cfg = {});

FloatRaster normalize(const RasterImage& img, const PreprocessConfig& cfg);

/// One-hot 3-channel encoding of sea/no-data/land.
FloatRaster encode_labels(const ClassMap& classes);

/// One-hot plus a fourth channel holding the smoothed coastline.
FloatRaster encode_labels(const ClassMap& classes, const CoastMask& coast,
                          const LabelSmoothingConfig& cfg);

/// Triangular-kernel smoothing of a coastline mask:
/// out(p) = peak * max(0, 1 - d/(radius+1)) with d the Chebyshev distance
/// to the nearest coast pixel. Coast pixels keep exactly the peak value.
FloatRaster smooth_labels(const CoastMask& coast, const LabelSmoothingConfig& cfg);

/// (w-a)*(h-b) unique overlapping a*b crops of a w*h image; zero when the
/// crop spans a full axis, matching the counting rule as printed.
uint64_t count_unique_crops(int w, int h, int a, int b);

} // namespace coastline
