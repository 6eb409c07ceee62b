#include "coastline/extract.hpp"

#include <algorithm>

namespace coastline {

Orientation resolve_orientation(OrientationMode mode, int width, int height) {
    switch (mode) {
    case OrientationMode::landscape: return Orientation::landscape;
    case OrientationMode::portrait: return Orientation::portrait;
    default: return width >= height ? Orientation::landscape : Orientation::portrait;
    }
}

ClassMap argmax_classes(const FloatRaster& probs) {
    if (probs.channels != 3)
        throw Error("argmax_classes: channel mismatch, expected 3 channels, got " +
                    std::to_string(probs.channels));
    ClassMap out(probs.width, probs.height);
    for (size_t i = 0; i < out.data.size(); ++i) {
        const float* p = &probs.data[3 * i];
        uint8_t best = 0;
        if (p[1] > p[best])
            best = 1;
        if (p[2] > p[best])
            best = 2;
        out.data[i] = best;
    }
    return out;
}

CoastMask extract_softmax(const FloatRaster& probs) {
    ClassMap classes = argmax_classes(probs);
    int w = classes.width, h = classes.height;
    CoastMask out(w, h);
    for (int y = 0; y < h; ++y) {
        int y0 = std::max(y - 1, 0), y1 = std::min(y + 1, h - 1);
        for (int x = 0; x < w; ++x) {
            int x0 = std::max(x - 1, 0), x1 = std::min(x + 1, w - 1);
            uint8_t lo = 2, hi = 0;
            for (int ny = y0; ny <= y1; ++ny) {
                for (int nx = x0; nx <= x1; ++nx) {
                    uint8_t c = classes.at(nx, ny);
                    lo = std::min(lo, c);
                    hi = std::max(hi, c);
                }
            }
            out.at(x, y) = (hi - lo == 2) ? 1 : 0;
        }
    }
    return out;
}

CoastMask extract_sigmoid(const FloatRaster& probs, OrientationMode mode) {
    if (probs.channels != 1)
        throw Error("extract_sigmoid: channel mismatch, expected 1 channel, got " +
                    std::to_string(probs.channels));
    int w = probs.width, h = probs.height;
    CoastMask out(w, h);
    if (resolve_orientation(mode, w, h) == Orientation::landscape) {
        for (int x = 0; x < w; ++x) {
            int best = 0;
            for (int y = 1; y < h; ++y)
                if (probs.at(x, y) > probs.at(x, best))
                    best = y;
            out.at(x, best) = 1;
        }
    } else {
        for (int y = 0; y < h; ++y) {
            int best = 0;
            for (int x = 1; x < w; ++x)
                if (probs.at(x, y) > probs.at(best, y))
                    best = x;
            out.at(best, y) = 1;
        }
    }
    return out;
}

CoastlinePath mask_to_path(const CoastMask& mask, OrientationMode mode) {
    int w = mask.width, h = mask.height;
    Orientation orient = resolve_orientation(mode, w, h);
    int primary = orient == Orientation::landscape ? w : h;
    int secondary = orient == Orientation::landscape ? h : w;

    CoastlinePath path(orient, primary);
    for (int i = 0; i < primary; ++i) {
        double sum = 0.0;
        int count = 0;
        for (int j = 0; j < secondary; ++j) {
            uint8_t v = orient == Orientation::landscape ? mask.at(i, j) : mask.at(j, i);
            if (v) {
                sum += j;
                ++count;
            }
        }
        if (count > 0)
            path.entries[static_cast<size_t>(i)] = PathEntry{sum / count, true};
    }
    return path;
}

} // namespace coastline
