#include "coastline/predict.hpp"

#include "coastline/distance.hpp"
#include "coastline/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <thread>

#include <sys/wait.h>
#include <unistd.h>

namespace coastline {

namespace {

// Window start positions covering [0, extent): stride steps plus a final
// window clamped to the border. extent >= side is guaranteed by the caller.
std::vector<int> window_starts(int extent, int side, int stride) {
    std::vector<int> v;
    for (int pos = 0;; pos += stride) {
        if (pos + side >= extent) {
            v.push_back(extent - side);
            break;
        }
        v.push_back(pos);
    }
    return v;
}

double bilinear_at(const FloatRaster& r, double x, double y) {
    x = std::clamp(x, 0.0, static_cast<double>(r.width - 1));
    y = std::clamp(y, 0.0, static_cast<double>(r.height - 1));
    int x0 = std::min(static_cast<int>(x), r.width - 1);
    int y0 = std::min(static_cast<int>(y), r.height - 1);
    int x1 = std::min(x0 + 1, r.width - 1);
    int y1 = std::min(y0 + 1, r.height - 1);
    double fx = x - x0, fy = y - y0;
    double top = (1.0 - fx) * r.at(x0, y0) + fx * r.at(x1, y0);
    double bot = (1.0 - fx) * r.at(x0, y1) + fx * r.at(x1, y1);
    return (1.0 - fy) * top + fy * bot;
}

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::string substitute(std::string pattern, const std::string& key, int value) {
    const std::string needle = "{" + key + "}";
    for (size_t pos = pattern.find(needle); pos != std::string::npos;
         pos = pattern.find(needle, pos))
        pattern.replace(pos, needle.size(), std::to_string(value));
    return pattern;
}

FloatRaster run_external(const std::string& command, const FloatRaster& tile) {
    static std::atomic<uint64_t> counter{0};
    namespace fs = std::filesystem;
    std::string base = "coastline-" + std::to_string(::getpid()) + "-" +
                       std::to_string(counter.fetch_add(1));
    fs::path in = fs::temp_directory_path() / (base + "-in.fr");
    fs::path out = fs::temp_directory_path() / (base + "-out.fr");

    write_float_raster(tile, in.string());
    std::string cmd = command + " '" + in.string() + "' '" + out.string() + "'";
    int status = std::system(cmd.c_str());

    std::error_code ec;
    auto cleanup = [&] {
        fs::remove(in, ec);
        fs::remove(out, ec);
    };
    if (status != 0) {
        cleanup();
        int code = WIFEXITED(status) ? WEXITSTATUS(status) : status;
        throw Error("external predictor failed (exit " + std::to_string(code) + "): " + command);
    }
    try {
        FloatRaster result = read_float_raster(out.string());
        cleanup();
        return result;
    } catch (...) {
        cleanup();
        throw;
    }
}

} // namespace

void TilingConfig::validate() const {
    if (tile_side < 1)
        throw Error("TilingConfig: tile_side must be >= 1");
    if (stride < 1 || stride > tile_side)
        throw Error("TilingConfig: need 0 < stride <= tile_side");
    if (scales.empty())
        throw Error("TilingConfig: scale list is empty");
    for (double s : scales)
        if (!(s >= 1.0) || !std::isfinite(s))
            throw Error("TilingConfig: scales must be finite and >= 1");
    if (smoothing_sigma < 0.0 || !std::isfinite(smoothing_sigma))
        throw Error("TilingConfig: smoothing_sigma must be >= 0");
}

CoastMask coastline_from_classes(const ClassMap& classes) {
    CoastMask coast(classes.width, classes.height);
    for (int y = 0; y < classes.height; ++y) {
        for (int x = 0; x < classes.width; ++x) {
            if (classes.at(x, y) != 2)
                continue;
            bool sea = (x > 0 && classes.at(x - 1, y) == 0) ||
                       (x + 1 < classes.width && classes.at(x + 1, y) == 0) ||
                       (y > 0 && classes.at(x, y - 1) == 0) ||
                       (y + 1 < classes.height && classes.at(x, y + 1) == 0);
            if (sea)
                coast.at(x, y) = 1;
        }
    }
    return coast;
}

Predictor::Predictor(PredictorSpec spec) : spec_(std::move(spec)) {
    if (spec_.ensemble_weight < 0.0 || !std::isfinite(spec_.ensemble_weight))
        throw Error("PredictorSpec: ensemble_weight must be finite and >= 0");
    if (const auto* oracle = std::get_if<OracleBackend>(&spec_.backend)) {
        const OracleConfig& cfg = oracle->cfg;
        if (!(cfg.sharpness > 0.0) || !std::isfinite(cfg.sharpness))
            throw Error("OracleConfig: sharpness must be > 0");
        if (cfg.noise_sigma < 0.0)
            throw Error("OracleConfig: noise_sigma must be >= 0");
        if (cfg.truth.width < 1 || cfg.truth.height < 1)
            throw Error("OracleConfig: empty truth map");

        std::vector<double> sq = distance_transform_squared(coastline_from_classes(cfg.truth));
        oracle_dist_ = FloatRaster(cfg.truth.width, cfg.truth.height, 1);
        double cap = std::hypot(cfg.truth.width, cfg.truth.height);
        for (size_t i = 0; i < sq.size(); ++i) {
            double d = std::sqrt(sq[i]);
            // An empty coastline leaves the field at the image diagonal.
            oracle_dist_.data[i] = static_cast<float>(std::isfinite(d) ? d : cap);
        }
    }
}

FloatRaster Predictor::oracle_map(int w, int h, const TileContext& ctx) const {
    const OracleConfig& cfg = std::get<OracleBackend>(spec_.backend).cfg;
    const ClassMap& truth = cfg.truth;
    Rect win = ctx.window;
    if (win.w < 1 || win.h < 1)
        win = Rect{0, 0, w, h};

    uint64_t stream = (static_cast<uint64_t>(ctx.scale_index) << 40) +
                      (static_cast<uint64_t>(ctx.row) << 20) + static_cast<uint64_t>(ctx.col);
    Rng rng(cfg.seed, stream);
    bool softmax = spec_.head == Head::softmax3;
    FloatRaster out(w, h, softmax ? 3 : 1);

    for (int j = 0; j < h; ++j) {
        double sy = grid_coord(j, h, win.y, win.h);
        int ny = std::clamp(static_cast<int>(std::lround(sy)), 0, truth.height - 1);
        for (int i = 0; i < w; ++i) {
            double sx = grid_coord(i, w, win.x, win.w);
            int nx = std::clamp(static_cast<int>(std::lround(sx)), 0, truth.width - 1);
            double d = bilinear_at(oracle_dist_, sx, sy);
            uint8_t cls = truth.at(nx, ny);

            if (!softmax) {
                double p = std::exp(-cfg.sharpness * d * d);
                if (cfg.noise_sigma > 0.0)
                    p += cfg.noise_sigma * rng.normal();
                out.at(i, j) = static_cast<float>(std::clamp(p, 0.0, 1.0));
                continue;
            }

            double p[3];
            if (cls == 1) {
                p[0] = 0.0;
                p[1] = 1.0;
                p[2] = 0.0;
            } else {
                double p_land = logistic(cfg.sharpness * (cls == 2 ? d : -d));
                p[0] = 1.0 - p_land;
                p[1] = 0.0;
                p[2] = p_land;
            }
            if (cfg.noise_sigma > 0.0)
                for (double& v : p)
                    v += cfg.noise_sigma * rng.normal();
            double sum = 0.0;
            for (double& v : p) {
                v = std::max(v, 0.0);
                sum += v;
            }
            for (int c = 0; c < 3; ++c)
                out.at(i, j, c) = static_cast<float>(sum > 0.0 ? p[c] / sum : 1.0 / 3.0);
        }
    }
    return out;
}

FloatRaster Predictor::predict(const FloatRaster& tile, const TileContext& ctx) {
    FloatRaster result;
    if (const auto* constant = std::get_if<ConstantBackend>(&spec_.backend)) {
        result = FloatRaster(tile.width, tile.height, output_channels(),
                             static_cast<float>(constant->value));
    } else if (std::holds_alternative<OracleBackend>(spec_.backend)) {
        result = oracle_map(tile.width, tile.height, ctx);
    } else if (const auto* file = std::get_if<FileBackend>(&spec_.backend)) {
        std::string path = substitute(file->pattern, "scale", ctx.scale_index);
        path = substitute(path, "row", ctx.row);
        path = substitute(path, "col", ctx.col);
        result = read_float_raster(path);
    } else {
        const auto& external = std::get<ExternalBackend>(spec_.backend);
        std::lock_guard<std::mutex> lock(external_mutex_);
        result = run_external(external.command, tile);
    }

    if (result.channels != output_channels())
        throw Error("predictor " + spec_.id + ": channel mismatch, head expects " +
                    std::to_string(output_channels()) + " channels, backend produced " +
                    std::to_string(result.channels));
    if (result.width != tile.width || result.height != tile.height)
        throw Error("predictor " + spec_.id + ": backend produced " +
                    std::to_string(result.width) + "x" + std::to_string(result.height) +
                    " for a " + std::to_string(tile.width) + "x" + std::to_string(tile.height) +
                    " tile");
    return result;
}

FloatRaster predict_tile(const PredictorSpec& spec, const FloatRaster& tile,
                         const TileContext& ctx) {
    Predictor p(spec);
    return p.predict(tile, ctx);
}

FloatRaster oracle_predict(const OracleConfig& cfg, Head head, int tile_side,
                           const TileContext& ctx) {
    PredictorSpec spec;
    spec.id = "oracle";
    spec.head = head;
    spec.backend = OracleBackend{cfg};
    Predictor p(std::move(spec));
    return p.predict(FloatRaster(tile_side, tile_side, 1), ctx);
}

FloatRaster gaussian_smooth(const FloatRaster& r, double sigma) {
    if (sigma < 0.0 || !std::isfinite(sigma))
        throw Error("gaussian_smooth: sigma must be >= 0");
    if (sigma == 0.0)
        return r;
    int radius = static_cast<int>(std::ceil(3.0 * sigma));
    if (radius < 1)
        return r;

    std::vector<double> kernel(static_cast<size_t>(2 * radius + 1));
    double total = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        double w = std::exp(-0.5 * (static_cast<double>(k) * k) / (sigma * sigma));
        kernel[static_cast<size_t>(k + radius)] = w;
        total += w;
    }
    for (double& w : kernel)
        w /= total;

    FloatRaster tmp(r.width, r.height, r.channels);
    for (int y = 0; y < r.height; ++y)
        for (int x = 0; x < r.width; ++x)
            for (int c = 0; c < r.channels; ++c) {
                double acc = 0.0;
                for (int k = -radius; k <= radius; ++k)
                    acc += kernel[static_cast<size_t>(k + radius)] *
                           r.at(reflect_index(x + k, r.width), y, c);
                tmp.at(x, y, c) = static_cast<float>(acc);
            }
    FloatRaster out(r.width, r.height, r.channels);
    for (int y = 0; y < r.height; ++y)
        for (int x = 0; x < r.width; ++x)
            for (int c = 0; c < r.channels; ++c) {
                double acc = 0.0;
                for (int k = -radius; k <= radius; ++k)
                    acc += kernel[static_cast<size_t>(k + radius)] *
                           tmp.at(x, reflect_index(y + k, r.height), c);
                out.at(x, y, c) = static_cast<float>(acc);
            }
    return out;
}

FloatRaster tiled_predict(Predictor& predictor, const FloatRaster& image,
                          const TilingConfig& cfg, int threads) {
    cfg.validate();
    if (image.width < 1 || image.height < 1)
        throw Error("tiled_predict: empty image");
    threads = std::max(1, threads);

    // Reflection-pad images smaller than one tile, crop the result back.
    const FloatRaster* src = &image;
    FloatRaster padded;
    if (image.width < cfg.tile_side || image.height < cfg.tile_side) {
        padded = FloatRaster(std::max(image.width, cfg.tile_side),
                             std::max(image.height, cfg.tile_side), image.channels);
        for (int y = 0; y < padded.height; ++y) {
            int sy = reflect_index(y, image.height);
            for (int x = 0; x < padded.width; ++x) {
                int sx = reflect_index(x, image.width);
                for (int c = 0; c < image.channels; ++c)
                    padded.at(x, y, c) = image.at(sx, sy, c);
            }
        }
        src = &padded;
    }
    const int W = src->width, H = src->height;
    const int C = predictor.output_channels();

    std::vector<double> acc(static_cast<size_t>(W) * H * C, 0.0);
    std::vector<uint32_t> cover(static_cast<size_t>(W) * H, 0);

    for (size_t si = 0; si < cfg.scales.size(); ++si) {
        double scale = cfg.scales[si];
        int win = std::min(static_cast<int>(std::lround(cfg.tile_side * scale)),
                           std::min(W, H));
        int stride = std::max(1, static_cast<int>(std::lround(cfg.stride * scale)));
        std::vector<int> xs = window_starts(W, win, stride);
        std::vector<int> ys = window_starts(H, win, stride);
        const int cols = static_cast<int>(xs.size());
        const int total = static_cast<int>(xs.size() * ys.size());

        auto compute = [&](int t) {
            int row = t / cols, col = t % cols;
            TileContext ctx;
            ctx.scale_index = static_cast<int>(si);
            ctx.scale = scale;
            ctx.row = row;
            ctx.col = col;
            ctx.window = Rect{xs[static_cast<size_t>(col)], ys[static_cast<size_t>(row)], win, win};
            FloatRaster tile = resample_bilinear(*src, ctx.window, cfg.tile_side, cfg.tile_side);
            FloatRaster pred = predictor.predict(tile, ctx);
            return resample_bilinear(pred, Rect{0, 0, cfg.tile_side, cfg.tile_side}, win, win);
        };
        auto reduce = [&](int t, const FloatRaster& back) {
            const Rect rect{xs[static_cast<size_t>(t % cols)], ys[static_cast<size_t>(t / cols)],
                            win, win};
            for (int y = 0; y < win; ++y) {
                size_t pix = static_cast<size_t>(rect.y + y) * W + rect.x;
                const float* s = &back.data[back.index(0, y)];
                double* a = &acc[pix * C];
                for (int x = 0; x < win; ++x) {
                    ++cover[pix + static_cast<size_t>(x)];
                    for (int c = 0; c < C; ++c)
                        a[x * C + c] += s[x * C + c];
                }
            }
        };

        if (threads == 1) {
            for (int t = 0; t < total; ++t)
                reduce(t, compute(t));
            continue;
        }
        // Workers fill a bounded chunk of tiles; the chunk is then folded in
        // ascending tile order so sums are bit-stable for any thread count.
        const int chunk = threads * 4;
        for (int start = 0; start < total; start += chunk) {
            const int end = std::min(start + chunk, total);
            std::vector<FloatRaster> results(static_cast<size_t>(end - start));
            std::atomic<int> next{start};
            std::exception_ptr failure;
            std::mutex failure_mutex;
            auto worker = [&] {
                for (;;) {
                    int t = next.fetch_add(1);
                    if (t >= end)
                        return;
                    try {
                        results[static_cast<size_t>(t - start)] = compute(t);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(failure_mutex);
                        if (!failure)
                            failure = std::current_exception();
                        return;
                    }
                }
            };
            std::vector<std::thread> pool;
            int n_workers = std::min(threads, end - start);
            pool.reserve(static_cast<size_t>(n_workers));
            for (int i = 0; i < n_workers; ++i)
                pool.emplace_back(worker);
            for (std::thread& th : pool)
                th.join();
            if (failure)
                std::rethrow_exception(failure);
            for (int t = start; t < end; ++t)
                reduce(t, results[static_cast<size_t>(t - start)]);
        }
    }

    FloatRaster out(W, H, C);
    if (cfg.aggregation == Aggregation::coverage_mean) {
        for (size_t pix = 0; pix < cover.size(); ++pix)
            for (int c = 0; c < C; ++c)
                out.data[pix * C + c] = static_cast<float>(acc[pix * C + c] / cover[pix]);
    } else {
        for (size_t i = 0; i < acc.size(); ++i)
            out.data[i] = static_cast<float>(acc[i]);
    }

    out = gaussian_smooth(out, cfg.smoothing_sigma);
    if (src == &padded)
        out = copy_region(out, Rect{0, 0, image.width, image.height});
    return out;
}

} // namespace coastline
