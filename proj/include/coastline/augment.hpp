#pragma once

#include "coastline/raster.hpp"
#include "coastline/resample.hpp"
#include "coastline/rng.hpp"

#include <span>

namespace coastline {

struct IntensityJitterConfig {
    double add_lo = -0.05, add_hi = 0.05;
    double mul_lo = 0.9, mul_hi = 1.1;
    double gamma_lo = 0.8, gamma_hi = 1.25;
    double noise_sigma = 0.02;
    double blur_prob = 0.0;
    double cropout_prob = 0.0;
    double cropout_max_frac = 0.25;
};

struct MosaicSpec {
    int grid_rows = 2;
    int grid_cols = 2;
    double replace_prob = 0.5;
    bool enabled = false;
};

struct AugmentConfig {
    int crop_side_min = 1024;
    int crop_side_max = 1536;
    int model_side = 512;
    double flip_h = 0.5;
    double flip_v = 0.5;
    double rot90 = 0.5;
    IntensityJitterConfig intensity;
    MosaicSpec mosaic;
    uint64_t seed = 0;

    void validate() const;
};

/// One attributable region of a sample: pixels of dst came from src in the
/// identified source image, resampled to dst's pre-transform footprint and
/// then flipped/rotated by transform. Records apply in order; later records
/// overwrite earlier ones (mosaic cells land on top of the base crop).
struct ProvenanceRecord {
    int source_id = 0;
    Rect src;
    Rect dst;
    FlipRotate transform;
};

struct Sample {
    FloatRaster image;
    FloatRaster label;
    std::vector<ProvenanceRecord> provenance;
};

/// A source the augmenter may draw from. Pointers are borrowed; the caller
/// keeps the rasters alive for the duration of the call.
struct SourceRef {
    int id = 0;
    const FloatRaster* image = nullptr;
    const FloatRaster* label = nullptr;
};

/// Square crop of uniformly drawn side within [crop_side_min, crop_side_max]
/// (clipped to the image) at a uniform position, resampled to
/// model_side x model_side: bilinear for the image, area-weighted for the
/// label. Throws if the image cannot fit crop_side_min even after clipping.
Sample random_crop_scale(const FloatRaster& image, const FloatRaster& label,
                         const AugmentConfig& cfg, Rng& rng, int source_id = 0);

/// Horizontal/vertical flip and k*90-degree rotation, each applied with its
/// configured probability, identically to image and label; provenance
/// transforms and destination rects are remapped accordingly.
Sample spatial_jitter(Sample sample, const AugmentConfig& cfg, Rng& rng);

/// Value jitter in the fixed order gamma, multiplicative shift, additive
/// shift, Gaussian noise, optional 3x3 box blur, optional cropout; image
/// values clamped to [0,1]. Labels are untouched except by cropout, which
/// zeroes the rect and marks it no-data when the label has 3+ channels.
Sample intensity_jitter(Sample sample, const IntensityJitterConfig& cfg, Rng& rng);

/// Partition the sample into grid_rows x grid_cols cells (remainder columns
/// and rows go to the last cell) and independently replace each cell, with
/// probability replace_prob, by a uniformly placed same-sized region of a
/// uniformly chosen donor. Appends one provenance record per replacement.
Sample multi_sample_mosaic(Sample sample, std::span<const SourceRef> donors,
                           const MosaicSpec& spec, Rng& rng);

/// Full augmentation for one sample: crop, spatial jitter, mosaic, intensity
/// jitter, driven by the RNG stream (cfg.seed, sample_index) so samples are
/// reproducible in any generation order. The primary source is drawn
/// uniformly; the remaining sources serve as mosaic donors.
Sample make_sample(std::span<const SourceRef> sources, const AugmentConfig& cfg,
                   uint64_t sample_index);

} // namespace coastline
