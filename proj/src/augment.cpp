#include "coastline/augment.hpp"

#include <algorithm>
#include <cmath>

namespace coastline {

namespace {

void check_prob(double p, const char* name) {
    if (p < 0.0 || p > 1.0 || !std::isfinite(p))
        throw Error(std::string("AugmentConfig: ") + name + " must be a probability in [0,1]");
}

// Equal partition with the remainder folded into the last row/column:
// cell k of n over extent e starts at k*(e/n) and the last cell absorbs
// e - (n-1)*(e/n).
std::vector<std::pair<int, int>> partition(int extent, int n) {
    int base = extent / n;
    std::vector<std::pair<int, int>> cells;
    cells.reserve(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
        int start = k * base;
        int size = k == n - 1 ? extent - start : base;
        cells.emplace_back(start, size);
    }
    return cells;
}

} // namespace

void AugmentConfig::validate() const {
    if (crop_side_min < 1 || crop_side_min > crop_side_max)
        throw Error("AugmentConfig: need 1 <= crop_side_min <= crop_side_max");
    if (model_side < 1)
        throw Error("AugmentConfig: model_side must be >= 1");
    check_prob(flip_h, "flip_h");
    check_prob(flip_v, "flip_v");
    check_prob(rot90, "rot90");
    check_prob(intensity.blur_prob, "blur_prob");
    check_prob(intensity.cropout_prob, "cropout_prob");
    check_prob(mosaic.replace_prob, "mosaic.replace_prob");
    if (intensity.noise_sigma < 0.0)
        throw Error("AugmentConfig: noise_sigma must be >= 0");
    if (intensity.cropout_max_frac <= 0.0 || intensity.cropout_max_frac >= 1.0)
        throw Error("AugmentConfig: cropout_max_frac must lie in (0,1)");
    if (mosaic.grid_rows < 1 || mosaic.grid_cols < 1)
        throw Error("AugmentConfig: mosaic grid must be at least 1x1");
}

Sample random_crop_scale(const FloatRaster& image, const FloatRaster& label,
                         const AugmentConfig& cfg, Rng& rng, int source_id) {
    if (image.width != label.width || image.height != label.height)
        throw Error("random_crop_scale: image and label dimensions differ");
    int avail = std::min(image.width, image.height);
    if (avail < cfg.crop_side_min)
        throw Error("random_crop_scale: image side " + std::to_string(avail) +
                    " is smaller than crop_side_min " + std::to_string(cfg.crop_side_min));
    int hi = std::min(cfg.crop_side_max, avail);

    int side = static_cast<int>(rng.uniform_int(cfg.crop_side_min, hi));
    int x = static_cast<int>(rng.uniform_int(0, image.width - side));
    int y = static_cast<int>(rng.uniform_int(0, image.height - side));

    Rect crop{x, y, side, side};
    Sample s;
    s.image = resample_bilinear(image, crop, cfg.model_side, cfg.model_side);
    s.label = resample_area(label, crop, cfg.model_side, cfg.model_side);
    s.provenance.push_back(
        {source_id, crop, Rect{0, 0, cfg.model_side, cfg.model_side}, FlipRotate::identity()});
    return s;
}

Sample spatial_jitter(Sample sample, const AugmentConfig& cfg, Rng& rng) {
    FlipRotate t = FlipRotate::identity();
    if (rng.next_double() < cfg.flip_h)
        t = t.then(FlipRotate::hflip());
    if (rng.next_double() < cfg.flip_v)
        t = t.then(FlipRotate::vflip());
    if (rng.next_double() < cfg.rot90)
        t = t.then(FlipRotate::quarter_turns(static_cast<int>(rng.uniform_int(1, 3))));
    if (t.is_identity())
        return sample;

    int w = sample.image.width, h = sample.image.height;
    sample.image = apply_flip_rotate(sample.image, t);
    sample.label = apply_flip_rotate(sample.label, t);
    for (ProvenanceRecord& rec : sample.provenance) {
        rec.dst = map_rect(rec.dst, t, w, h);
        rec.transform = rec.transform.then(t);
    }
    return sample;
}

Sample intensity_jitter(Sample sample, const IntensityJitterConfig& cfg, Rng& rng) {
    double gamma = rng.uniform(cfg.gamma_lo, cfg.gamma_hi);
    double mul = rng.uniform(cfg.mul_lo, cfg.mul_hi);
    double add = rng.uniform(cfg.add_lo, cfg.add_hi);

    FloatRaster& img = sample.image;
    for (float& f : img.data) {
        double v = f;
        if (gamma != 1.0)
            v = std::pow(std::max(v, 0.0), gamma);
        v = v * mul + add;
        if (cfg.noise_sigma > 0.0)
            v += cfg.noise_sigma * rng.normal();
        f = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }

    if (rng.next_double() < cfg.blur_prob) {
        // 3x3 box blur, neighborhoods clipped at the borders.
        FloatRaster blurred = img;
        for (int y = 0; y < img.height; ++y) {
            int y0 = std::max(y - 1, 0), y1 = std::min(y + 1, img.height - 1);
            for (int x = 0; x < img.width; ++x) {
                int x0 = std::max(x - 1, 0), x1 = std::min(x + 1, img.width - 1);
                for (int c = 0; c < img.channels; ++c) {
                    double acc = 0.0;
                    int n = 0;
                    for (int ny = y0; ny <= y1; ++ny)
                        for (int nx = x0; nx <= x1; ++nx) {
                            acc += img.at(nx, ny, c);
                            ++n;
                        }
                    blurred.at(x, y, c) = static_cast<float>(acc / n);
                }
            }
        }
        img = std::move(blurred);
    }

    if (rng.next_double() < cfg.cropout_prob) {
        // Side bound chosen so the rect area never exceeds the configured
        // fraction of the sample area.
        int max_side = std::max(
            1, static_cast<int>(std::floor(std::min(img.width, img.height) *
                                           std::sqrt(cfg.cropout_max_frac))));
        int cw = static_cast<int>(rng.uniform_int(1, max_side));
        int ch = static_cast<int>(rng.uniform_int(1, max_side));
        int cx = static_cast<int>(rng.uniform_int(0, img.width - cw));
        int cy = static_cast<int>(rng.uniform_int(0, img.height - ch));
        for (int y = cy; y < cy + ch; ++y)
            for (int x = cx; x < cx + cw; ++x) {
                for (int c = 0; c < img.channels; ++c)
                    img.at(x, y, c) = 0.0f;
                for (int c = 0; c < sample.label.channels; ++c)
                    sample.label.at(x, y, c) = 0.0f;
                if (sample.label.channels >= 3)
                    sample.label.at(x, y, 1) = 1.0f; // no-data class
            }
    }
    return sample;
}

Sample multi_sample_mosaic(Sample sample, std::span<const SourceRef> donors,
                           const MosaicSpec& spec, Rng& rng) {
    if (!spec.enabled || spec.replace_prob <= 0.0)
        return sample;
    if (donors.empty())
        throw Error("multi_sample_mosaic: enabled but no donor sources");

    auto rows = partition(sample.image.height, spec.grid_rows);
    auto cols = partition(sample.image.width, spec.grid_cols);
    for (const auto& [cy, chh] : rows) {
        for (const auto& [cx, cw] : cols) {
            if (rng.next_double() >= spec.replace_prob)
                continue;
            const SourceRef& donor = donors[rng.uniform_int(0, static_cast<int64_t>(donors.size()) - 1)];
            if (donor.image->channels != sample.image.channels ||
                donor.label->channels != sample.label.channels)
                throw Error("multi_sample_mosaic: donor " + std::to_string(donor.id) +
                            " channel layout differs from the sample");
            if (donor.image->width < cw || donor.image->height < chh)
                throw Error("multi_sample_mosaic: donor " + std::to_string(donor.id) +
                            " is smaller than a " + std::to_string(cw) + "x" +
                            std::to_string(chh) + " cell");
            int dx = static_cast<int>(rng.uniform_int(0, donor.image->width - cw));
            int dy = static_cast<int>(rng.uniform_int(0, donor.image->height - chh));
            Rect src{dx, dy, cw, chh};
            paste_region(sample.image, copy_region(*donor.image, src), cx, cy);
            paste_region(sample.label, copy_region(*donor.label, src), cx, cy);
            sample.provenance.push_back(
                {donor.id, src, Rect{cx, cy, cw, chh}, FlipRotate::identity()});
        }
    }
    return sample;
}

Sample make_sample(std::span<const SourceRef> sources, const AugmentConfig& cfg,
                   uint64_t sample_index) {
    cfg.validate();
    if (sources.empty())
        throw Error("make_sample: no sources");
    for (const SourceRef& s : sources)
        if (!s.image || !s.label)
            throw Error("make_sample: source " + std::to_string(s.id) + " has null rasters");
    if (cfg.mosaic.enabled && sources.size() < 2)
        throw Error("make_sample: mosaicing needs at least two sources");

    Rng rng(cfg.seed, sample_index);
    size_t primary = static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(sources.size()) - 1));

    Sample s = random_crop_scale(*sources[primary].image, *sources[primary].label, cfg, rng,
                                 sources[primary].id);
    s = spatial_jitter(std::move(s), cfg, rng);
    if (cfg.mosaic.enabled) {
        std::vector<SourceRef> donors;
        donors.reserve(sources.size() - 1);
        for (size_t i = 0; i < sources.size(); ++i)
            if (i != primary)
                donors.push_back(sources[i]);
        s = multi_sample_mosaic(std::move(s), donors, cfg.mosaic, rng);
    }
    return intensity_jitter(std::move(s), cfg.intensity, rng);
}

} // namespace coastline
