#include "coastline/ensemble.hpp"

#include <algorithm>
#include <cmath>

namespace coastline {

CoastlinePath ensemble_paths(std::span<const CoastlinePath> paths, std::span<const double> weights) {
    if (paths.empty())
        throw Error("ensemble_paths: no paths given");
    if (weights.size() != paths.size())
        throw Error("ensemble_paths: " + std::to_string(paths.size()) + " paths but " +
                    std::to_string(weights.size()) + " weights");

    const CoastlinePath& first = paths[0];
    for (const CoastlinePath& p : paths) {
        if (p.orientation != first.orientation)
            throw Error("ensemble_paths: mixed orientations");
        if (p.length() != first.length())
            throw Error("ensemble_paths: length mismatch, " + std::to_string(p.length()) +
                        " vs " + std::to_string(first.length()));
    }
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0 || !std::isfinite(w))
            throw Error("ensemble_paths: weights must be finite and non-negative");
        total += w;
    }
    if (total <= 0.0)
        throw Error("ensemble_paths: all weights are zero");

    CoastlinePath out(first.orientation, first.length());
    for (int i = 0; i < first.length(); ++i) {
        double wsum = 0.0, acc = 0.0;
        for (size_t m = 0; m < paths.size(); ++m) {
            const PathEntry& e = paths[m].entries[static_cast<size_t>(i)];
            if (e.present && weights[m] > 0.0) {
                wsum += weights[m];
                acc += weights[m] * e.coord;
            }
        }
        if (wsum > 0.0)
            out.entries[static_cast<size_t>(i)] = PathEntry{acc / wsum, true};
    }
    return out;
}

CoastlinePath interpolate_gaps(const CoastlinePath& path) {
    CoastlinePath out = path;
    int n = out.length();
    int prev = -1;
    for (int i = 0; i < n; ++i) {
        if (!out.entries[static_cast<size_t>(i)].present)
            continue;
        if (prev >= 0 && i - prev > 1) {
            double y0 = out.entries[static_cast<size_t>(prev)].coord;
            double y1 = out.entries[static_cast<size_t>(i)].coord;
            for (int j = prev + 1; j < i; ++j) {
                double t = static_cast<double>(j - prev) / (i - prev);
                out.entries[static_cast<size_t>(j)] = PathEntry{y0 + t * (y1 - y0), true};
            }
        }
        prev = i;
    }
    return out;
}

CoastMask fill_gaps(const CoastlinePath& path, int secondary_extent, bool interpolate_absent) {
    if (secondary_extent < 1)
        throw Error("fill_gaps: secondary extent must be positive");

    CoastlinePath dense = interpolate_absent ? interpolate_gaps(path) : path;
    int n = dense.length();
    bool landscape = dense.orientation == Orientation::landscape;
    CoastMask mask(landscape ? n : secondary_extent, landscape ? secondary_extent : n);

    auto clamp_coord = [secondary_extent](double c) {
        long r = std::lround(c);
        return static_cast<int>(std::clamp(r, 0L, static_cast<long>(secondary_extent - 1)));
    };
    auto set = [&](int primary, int secondary) {
        if (landscape)
            mask.at(primary, secondary) = 1;
        else
            mask.at(secondary, primary) = 1;
    };

    int prev = -1;
    for (int i = 0; i < n; ++i) {
        const PathEntry& e = dense.entries[static_cast<size_t>(i)];
        if (!e.present)
            continue;
        set(i, clamp_coord(e.coord));
        if (prev >= 0 && prev == i - 1) {
            double y0 = dense.entries[static_cast<size_t>(prev)].coord;
            double y1 = e.coord;
            if (std::abs(y1 - y0) > 1.0) {
                double lo = std::min(y0, y1), hi = std::max(y0, y1);
                for (int y = static_cast<int>(std::floor(lo)) + 1; y < hi; ++y)
                    set(i, std::clamp(y, 0, secondary_extent - 1));
            }
        }
        prev = i;
    }
    return mask;
}

} // namespace coastline
