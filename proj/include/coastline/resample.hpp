#pragma once

#include "coastline/raster.hpp"

namespace coastline {

struct Rect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    bool operator==(const Rect&) const = default;
};

/// Axis-aligned flip/rotation: transpose first, then mirror the destination
/// axes. Every composition of flips and quarter turns reduces to this form.
struct FlipRotate {
    bool transpose = false;
    bool flip_x = false;
    bool flip_y = false;

    bool operator==(const FlipRotate&) const = default;

    bool is_identity() const { return !transpose && !flip_x && !flip_y; }

    static FlipRotate identity() { return {}; }
    static FlipRotate hflip() { return {false, true, false}; }
    static FlipRotate vflip() { return {false, false, true}; }
    /// k quarter turns clockwise.
    static FlipRotate quarter_turns(int k);

    /// Transform equivalent to applying *this first, then next.
    FlipRotate then(const FlipRotate& next) const {
        FlipRotate r;
        r.transpose = transpose != next.transpose;
        if (next.transpose) {
            r.flip_x = flip_y != next.flip_x;
            r.flip_y = flip_x != next.flip_y;
        } else {
            r.flip_x = flip_x != next.flip_x;
            r.flip_y = flip_y != next.flip_y;
        }
        return r;
    }

    /// Destination of source pixel (x,y) in a w*h raster.
    void map_pixel(int x, int y, int w, int h, int& out_x, int& out_y) const {
        int u = transpose ? y : x;
        int v = transpose ? x : y;
        int ow = transpose ? h : w;
        int oh = transpose ? w : h;
        out_x = flip_x ? ow - 1 - u : u;
        out_y = flip_y ? oh - 1 - v : v;
    }
};

FloatRaster apply_flip_rotate(const FloatRaster& src, const FlipRotate& t);

/// Image of rect r under t, for a source raster of size w*h.
Rect map_rect(const Rect& r, const FlipRotate& t, int w, int h);

/// Bilinear resampling of a source window to dst_w*dst_h. Corner-aligned
/// grid: destination pixel j samples the window at j*(side-1)/(dst-1), so
/// an equal-size window copies exactly and corners always map to corners.
FloatRaster resample_bilinear(const FloatRaster& src, const Rect& window, int dst_w, int dst_h);

/// Area-weighted resampling (overlap-box average); keeps values in the
/// convex hull of the inputs, suited to soft labels.
FloatRaster resample_area(const FloatRaster& src, const Rect& window, int dst_w, int dst_h);

FloatRaster copy_region(const FloatRaster& src, const Rect& r);

/// Copies src into dst with src's top-left corner at (dst_x, dst_y).
void paste_region(FloatRaster& dst, const FloatRaster& src, int dst_x, int dst_y);

/// Source coordinate of destination index j on a corner-aligned grid: corners
/// map to corners, a single destination sample lands on the window center.
inline double grid_coord(int j, int dst_n, int src_origin, int src_n) {
    if (dst_n == 1)
        return src_origin + (src_n - 1) / 2.0;
    return src_origin + static_cast<double>(j) * (src_n - 1) / (dst_n - 1);
}

/// Mirror an out-of-range index back into [0,n): -1 -> 0, n -> n-1.
inline int reflect_index(int i, int n) {
    while (i < 0 || i >= n) {
        if (i < 0)
            i = -i - 1;
        if (i >= n)
            i = 2 * n - 1 - i;
    }
    return i;
}

} // namespace coastline
