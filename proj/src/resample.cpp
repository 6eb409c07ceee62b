#include "coastline/resample.hpp"

#include <algorithm>
#include <cmath>

namespace coastline {

namespace {

void check_window(const FloatRaster& src, const Rect& r, const char* what) {
    if (r.w < 1 || r.h < 1 || r.x < 0 || r.y < 0 || r.x + r.w > src.width ||
        r.y + r.h > src.height)
        throw Error(std::string(what) + ": window outside source raster");
}

} // namespace

FlipRotate FlipRotate::quarter_turns(int k) {
    FlipRotate turn{true, true, false}; // (x,y) -> (n-1-y, x)
    FlipRotate r;
    k = ((k % 4) + 4) % 4;
    for (int i = 0; i < k; ++i)
        r = r.then(turn);
    return r;
}

FloatRaster apply_flip_rotate(const FloatRaster& src, const FlipRotate& t) {
    if (t.is_identity())
        return src;
    int out_w = t.transpose ? src.height : src.width;
    int out_h = t.transpose ? src.width : src.height;
    FloatRaster out(out_w, out_h, src.channels);
    for (int y = 0; y < src.height; ++y) {
        for (int x = 0; x < src.width; ++x) {
            int ox = 0, oy = 0;
            t.map_pixel(x, y, src.width, src.height, ox, oy);
            for (int c = 0; c < src.channels; ++c)
                out.at(ox, oy, c) = src.at(x, y, c);
        }
    }
    return out;
}

Rect map_rect(const Rect& r, const FlipRotate& t, int w, int h) {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    t.map_pixel(r.x, r.y, w, h, x0, y0);
    t.map_pixel(r.x + r.w - 1, r.y + r.h - 1, w, h, x1, y1);
    return Rect{std::min(x0, x1), std::min(y0, y1), std::abs(x1 - x0) + 1,
                std::abs(y1 - y0) + 1};
}

FloatRaster resample_bilinear(const FloatRaster& src, const Rect& window, int dst_w, int dst_h) {
    check_window(src, window, "resample_bilinear");
    if (dst_w < 1 || dst_h < 1)
        throw Error("resample_bilinear: destination must be at least 1x1");

    FloatRaster out(dst_w, dst_h, src.channels);
    int last_x = window.x + window.w - 1;
    int last_y = window.y + window.h - 1;
    for (int j = 0; j < dst_h; ++j) {
        double sy = grid_coord(j, dst_h, window.y, window.h);
        int y0 = std::clamp(static_cast<int>(std::floor(sy)), window.y, last_y);
        int y1 = std::min(y0 + 1, last_y);
        double fy = sy - y0;
        for (int i = 0; i < dst_w; ++i) {
            double sx = grid_coord(i, dst_w, window.x, window.w);
            int x0 = std::clamp(static_cast<int>(std::floor(sx)), window.x, last_x);
            int x1 = std::min(x0 + 1, last_x);
            double fx = sx - x0;
            for (int c = 0; c < src.channels; ++c) {
                double top = (1.0 - fx) * src.at(x0, y0, c) + fx * src.at(x1, y0, c);
                double bot = (1.0 - fx) * src.at(x0, y1, c) + fx * src.at(x1, y1, c);
                out.at(i, j, c) = static_cast<float>((1.0 - fy) * top + fy * bot);
            }
        }
    }
    return out;
}

FloatRaster resample_area(const FloatRaster& src, const Rect& window, int dst_w, int dst_h) {
    check_window(src, window, "resample_area");
    if (dst_w < 1 || dst_h < 1)
        throw Error("resample_area: destination must be at least 1x1");

    FloatRaster out(dst_w, dst_h, src.channels);
    double kx = static_cast<double>(window.w) / dst_w;
    double ky = static_cast<double>(window.h) / dst_h;
    std::vector<double> acc(static_cast<size_t>(src.channels));
    for (int j = 0; j < dst_h; ++j) {
        double ylo = window.y + j * ky;
        double yhi = window.y + (j + 1) * ky;
        int ya = static_cast<int>(std::floor(ylo));
        int yb = std::min(static_cast<int>(std::ceil(yhi)), window.y + window.h);
        for (int i = 0; i < dst_w; ++i) {
            double xlo = window.x + i * kx;
            double xhi = window.x + (i + 1) * kx;
            int xa = static_cast<int>(std::floor(xlo));
            int xb = std::min(static_cast<int>(std::ceil(xhi)), window.x + window.w);
            std::fill(acc.begin(), acc.end(), 0.0);
            double wsum = 0.0;
            for (int y = ya; y < yb; ++y) {
                double wy = std::min<double>(yhi, y + 1) - std::max<double>(ylo, y);
                if (wy <= 0.0)
                    continue;
                for (int x = xa; x < xb; ++x) {
                    double wx = std::min<double>(xhi, x + 1) - std::max<double>(xlo, x);
                    if (wx <= 0.0)
                        continue;
                    double wgt = wx * wy;
                    wsum += wgt;
                    for (int c = 0; c < src.channels; ++c)
                        acc[static_cast<size_t>(c)] += wgt * src.at(x, y, c);
                }
            }
            for (int c = 0; c < src.channels; ++c)
                out.at(i, j, c) = static_cast<float>(acc[static_cast<size_t>(c)] / wsum);
        }
    }
    return out;
}

FloatRaster copy_region(const FloatRaster& src, const Rect& r) {
    check_window(src, r, "copy_region");
    FloatRaster out(r.w, r.h, src.channels);
    for (int y = 0; y < r.h; ++y) {
        const float* s = &src.data[src.index(r.x, r.y + y)];
        float* d = &out.data[out.index(0, y)];
        std::copy_n(s, static_cast<size_t>(r.w) * src.channels, d);
    }
    return out;
}

void paste_region(FloatRaster& dst, const FloatRaster& src, int dst_x, int dst_y) {
    if (src.channels != dst.channels)
        throw Error("paste_region: channel mismatch");
    if (dst_x < 0 || dst_y < 0 || dst_x + src.width > dst.width ||
        dst_y + src.height > dst.height)
        throw Error("paste_region: source does not fit destination");
    for (int y = 0; y < src.height; ++y) {
        const float* s = &src.data[src.index(0, y)];
        float* d = &dst.data[dst.index(dst_x, dst_y + y)];
        std::copy_n(s, static_cast<size_t>(src.width) * src.channels, d);
    }
}

} // namespace coastline
