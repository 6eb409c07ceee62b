#include "coastline/distance.hpp"

#include <limits>

namespace coastline {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1-D squared-distance transform by lower envelope of parabolas.
void transform_1d(const double* f, double* out, int n, int* v, double* z) {
    int k = 0;
    v[0] = 0;
    z[0] = -kInf;
    z[1] = kInf;
    for (int q = 1; q < n; ++q) {
        if (f[q] == kInf)
            continue;
        if (f[v[0]] == kInf) { // no finite parabola seen yet
            v[0] = q;
            continue;
        }
        double s;
        for (;;) {
            int p = v[k];
            s = ((f[q] + static_cast<double>(q) * q) - (f[p] + static_cast<double>(p) * p)) /
                (2.0 * (q - p));
            if (s > z[k])
                break;
            --k;
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kInf;
    }
    if (f[v[0]] == kInf) {
        for (int q = 0; q < n; ++q)
            out[q] = kInf;
        return;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q)
            ++k;
        double dq = q - v[k];
        out[q] = dq * dq + f[v[k]];
    }
}

} // namespace

std::vector<double> distance_transform_squared(const CoastMask& mask) {
    int w = mask.width, h = mask.height;
    std::vector<double> d(mask.data.size());
    for (size_t i = 0; i < mask.data.size(); ++i)
        d[i] = mask.data[i] ? 0.0 : kInf;

    int n = std::max(w, h);
    std::vector<double> col_in(static_cast<size_t>(n)), col_out(static_cast<size_t>(n));
    std::vector<int> v(static_cast<size_t>(n));
    std::vector<double> z(static_cast<size_t>(n) + 1);

    // columns first, then rows
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y)
            col_in[static_cast<size_t>(y)] = d[static_cast<size_t>(y) * w + x];
        transform_1d(col_in.data(), col_out.data(), h, v.data(), z.data());
        for (int y = 0; y < h; ++y)
            d[static_cast<size_t>(y) * w + x] = col_out[static_cast<size_t>(y)];
    }
    for (int y = 0; y < h; ++y) {
        double* row = &d[static_cast<size_t>(y) * w];
        for (int x = 0; x < w; ++x)
            col_in[static_cast<size_t>(x)] = row[x];
        transform_1d(col_in.data(), col_out.data(), w, v.data(), z.data());
        for (int x = 0; x < w; ++x)
            row[x] = col_out[static_cast<size_t>(x)];
    }
    return d;
}

} // namespace coastline
