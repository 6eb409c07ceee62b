#pragma once

#include <cmath>
#include <cstdint>

#include "coastline/raster.hpp"

namespace coastline {

/// Counter-based SplitMix64 generator.
///
/// Draw i of stream s under seed k is defined as
///     finalize(origin + PHI * (i+1)),  origin = finalize(k + PHI * (s+1)),
/// where PHI = 0x9e3779b97f4a7c15 and finalize is the SplitMix64 output
/// function (Steele, Lea & Flood 2014). The sequence depends only on
/// (seed, stream, draw index), so independent streams can be handed to
/// parallel workers and reimplementations in other languages can match
/// draws exactly.
class Rng {
public:
    static constexpr uint64_t PHI = 0x9e3779b97f4a7c15ull;

    static uint64_t finalize(uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    explicit Rng(uint64_t seed, uint64_t stream = 0)
        : origin_(finalize(seed + PHI * (stream + 1))) {}

    uint64_t next_u64() { return finalize(origin_ + PHI * ++counter_); }

    /// Uniform in [0,1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Uniform integer in [lo, hi], inclusive. Modulo reduction, one draw.
    int64_t uniform_int(int64_t lo, int64_t hi) {
        if (lo > hi)
            throw Error("Rng::uniform_int: empty range");
        uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
        return lo + static_cast<int64_t>(next_u64() % span);
    }

    /// Standard normal via Box-Muller, cosine branch. Two draws per call.
    double normal() {
        double u1 = 1.0 - next_double(); // (0,1], keeps the log finite
        double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    /// Gamma(shape, 1) for shape >= 1, Marsaglia-Tsang squeeze method.
    double gamma(double shape) {
        if (shape < 1.0)
            throw Error("Rng::gamma: shape must be >= 1");
        double d = shape - 1.0 / 3.0;
        double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            double u = next_double();
            if (u < 1.0 - 0.0331 * x * x * x * x)
                return d * v;
            if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
                return d * v;
        }
    }

private:
    uint64_t origin_;
    uint64_t counter_ = 0;
};

} // namespace coastline
