#pragma once

#include "coastline/raster.hpp"
#include "coastline/resample.hpp"

#include <mutex>
#include <string>
#include <variant>
#include <vector>

namespace coastline {

enum class InputMode { linear, log };
enum class Head { softmax3, sigmoid1 };
enum class Aggregation { sum, coverage_mean };

inline int head_channels(Head h) { return h == Head::softmax3 ? 3 : 1; }

/// Verification predictor built from known ground truth. It reads nothing
/// from the tile pixels; predictions are derived from the class map and the
/// distance to the coastline, degraded by seeded Gaussian noise.
///
/// Let d(x,y) be the Euclidean distance to the nearest coastline pixel
/// (a land pixel with a sea 4-neighbor), sampled bilinearly at the source
/// coordinates the tile pixel maps to, and let cls be the truth class at the
/// nearest source pixel. Then:
///   sigmoid1:  p = clamp(exp(-sharpness * d^2) + noise, 0, 1)
///   softmax3:  cls == no-data -> (0, 1, 0); otherwise with
///              p_land = 1 / (1 + exp(-sharpness * sd)), sd = +d on land,
///              -d at sea: (1 - p_land, 0, p_land); then noise is added per
///              channel, channels are clamped to >= 0 and renormalized to
///              sum 1.
/// noise ~ N(0, noise_sigma^2) drawn from the stream
/// scale_index * 2^40 + row * 2^20 + col, so every tile's noise depends only
/// on its grid position, never on evaluation order.
struct OracleConfig {
    ClassMap truth;
    double sharpness = 1.0;
    double noise_sigma = 0.0;
    uint64_t seed = 0;
};

struct ConstantBackend {
    double value = 0.5;
};
struct OracleBackend {
    OracleConfig cfg;
};
/// Reads precomputed tiles from files; the pattern substitutes {scale}
/// (scale index), {row} and {col}.
struct FileBackend {
    std::string pattern;
};
/// Runs `<command> <in.fr> <out.fr>` per tile; a nonzero exit is an error.
/// Invocations are serialized.
struct ExternalBackend {
    std::string command;
};

using Backend = std::variant<ConstantBackend, OracleBackend, FileBackend, ExternalBackend>;

struct PredictorSpec {
    std::string id = "predictor";
    InputMode input_mode = InputMode::log;
    Head head = Head::softmax3;
    double ensemble_weight = 1.0;
    Backend backend = ConstantBackend{};
};

struct TilingConfig {
    int tile_side = 512;
    int stride = 256;
    std::vector<double> scales{1.0, 2.0, 3.0};
    double smoothing_sigma = 2.0;
    Aggregation aggregation = Aggregation::coverage_mean;

    void validate() const;
};

/// Position of a tile within the floating-window sweep. window is the source
/// window in image coordinates (side ~ tile_side * scale); the tile handed to
/// the backend is that window resampled to tile_side.
struct TileContext {
    int scale_index = 0;
    double scale = 1.0;
    int row = 0;
    int col = 0;
    Rect window;
};

/// Coastline pixels implied by a class map: land pixels with at least one
/// sea 4-neighbor.
CoastMask coastline_from_classes(const ClassMap& classes);

/// One model behind a uniform interface. Thread-safe: oracle distance fields
/// are precomputed up front and the external backend is serialized.
class Predictor {
public:
    explicit Predictor(PredictorSpec spec);

    const PredictorSpec& spec() const { return spec_; }
    int output_channels() const { return head_channels(spec_.head); }

    /// Predict one tile. Output matches the tile footprint with
    /// head_channels(head) channels; anything else from a backend is a
    /// channel-mismatch error.
    FloatRaster predict(const FloatRaster& tile, const TileContext& ctx);

private:
    FloatRaster oracle_map(int w, int h, const TileContext& ctx) const;

    PredictorSpec spec_;
    FloatRaster oracle_dist_; // unsigned distance to the coastline, oracle only
    std::mutex external_mutex_;
};

/// Convenience wrapper over a transient Predictor.
FloatRaster predict_tile(const PredictorSpec& spec, const FloatRaster& tile,
                         const TileContext& ctx = {});

/// Oracle prediction for a window at tile resolution (see OracleConfig).
FloatRaster oracle_predict(const OracleConfig& cfg, Head head, int tile_side,
                           const TileContext& ctx);

/// Separable Gaussian blur, kernel truncated at radius ceil(3*sigma) and
/// renormalized, reflective borders; sigma = 0 is the identity.
FloatRaster gaussian_smooth(const FloatRaster& r, double sigma);

/// Floating-window prediction: for every scale, square windows of side
/// round(tile_side * scale) are swept at stride round(stride * scale)
/// (the last window clamped to the border), resampled to tile_side,
/// predicted, resampled back and accumulated. coverage_mean divides the
/// accumulated sum by the per-pixel window count; sum leaves it raw. The
/// aggregate is Gaussian-smoothed per channel. Images smaller than tile_side
/// are reflection-padded and cropped back. Results are bit-identical for any
/// thread count: tiles are pure functions of their grid position and the
/// reduction runs in ascending (scale, row, col) order.
FloatRaster tiled_predict(Predictor& predictor, const FloatRaster& image,
                          const TilingConfig& cfg, int threads = 1);

} // namespace coastline
