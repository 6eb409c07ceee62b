#include "doctest.h"

#include "test_support.hpp"

#include "coastline/predict.hpp"
#include "coastline/rng.hpp"

#include <cmath>
#include <vector>

using namespace coastline;
using test_support::TempDir;

namespace {

// Land below row `coast_row`, sea above; the coast pixels form that row.
ClassMap half_plane(int w, int h, int coast_row) {
    ClassMap truth(w, h);
    for (int y = coast_row; y < h; ++y)
        for (int x = 0; x < w; ++x)
            truth.at(x, y) = 2;
    return truth;
}

PredictorSpec oracle_spec(ClassMap truth, Head head, double sharpness = 1.0,
                          double noise_sigma = 0.0, uint64_t seed = 0) {
    PredictorSpec spec;
    spec.id = "oracle";
    spec.head = head;
    spec.backend = OracleBackend{OracleConfig{std::move(truth), sharpness, noise_sigma, seed}};
    return spec;
}

} // namespace

TEST_CASE("coastline pixels are land with a sea 4-neighbor") {
    ClassMap truth = half_plane(6, 6, 3);
    truth.at(2, 2) = 1; // no-data floating in the sea
    CoastMask coast = coastline_from_classes(truth);
    for (int x = 0; x < 6; ++x) {
        // The land pixel under the floating no-data patch touches no sea.
        CHECK(coast.at(x, 3) == (x == 2 ? 0 : 1));
        CHECK(coast.at(x, 4) == 0); // interior land
        CHECK(coast.at(x, 0) == 0); // sea
    }
    // Land whose only non-land neighbor is no-data is not coastline.
    ClassMap blocked = half_plane(3, 4, 2);
    for (int x = 0; x < 3; ++x)
        blocked.at(x, 1) = 1;
    CoastMask none = coastline_from_classes(blocked);
    for (uint8_t v : none.data)
        CHECK(v == 0);
}

TEST_CASE("constant backend fills the head's channels") {
    PredictorSpec spec;
    spec.head = Head::sigmoid1;
    spec.backend = ConstantBackend{0.7};
    FloatRaster tile(5, 4, 1);
    FloatRaster out = predict_tile(spec, tile);
    CHECK(out.channels == 1);
    CHECK(out.width == 5);
    for (float v : out.data)
        CHECK(v == 0.7f);

    spec.head = Head::softmax3;
    out = predict_tile(spec, tile);
    CHECK(out.channels == 3);
    for (float v : out.data)
        CHECK(v == 0.7f);
}

TEST_CASE("file backend substitutes the tile position") {
    TempDir dir("filebk");
    FloatRaster stored(4, 4, 1, 0.25f);
    write_float_raster(stored, dir.file("t-1-2-3.fr"));

    PredictorSpec spec;
    spec.head = Head::sigmoid1;
    spec.backend = FileBackend{dir.file("t-{scale}-{row}-{col}.fr")};
    TileContext ctx;
    ctx.scale_index = 1;
    ctx.row = 2;
    ctx.col = 3;
    FloatRaster out = predict_tile(spec, FloatRaster(4, 4, 1), ctx);
    CHECK(test_support::same_raster(out, stored));

    ctx.col = 4; // no such file
    CHECK_THROWS_AS(predict_tile(spec, FloatRaster(4, 4, 1), ctx), IoError);
}

TEST_CASE("backend output must match the head and the tile footprint") {
    TempDir dir("shape");
    write_float_raster(FloatRaster(4, 4, 1, 0.5f), dir.file("one.fr"));

    PredictorSpec spec;
    spec.head = Head::softmax3; // expects 3 channels
    spec.backend = FileBackend{dir.file("one.fr")};
    CHECK_THROWS_WITH_AS(predict_tile(spec, FloatRaster(4, 4, 1)),
                         doctest::Contains("channel mismatch"), Error);

    spec.head = Head::sigmoid1;
    CHECK_THROWS_WITH_AS(predict_tile(spec, FloatRaster(8, 8, 1)),
                         doctest::Contains("backend produced 4x4"), Error);
}

TEST_CASE("sigmoid oracle decays with the squared coast distance") {
    // 16x16, coast along row 8; identity mapping via the default window.
    OracleConfig cfg{half_plane(16, 16, 8), 1.0, 0.0, 0};
    FloatRaster out = oracle_predict(cfg, Head::sigmoid1, 16, {});
    REQUIRE(out.channels == 1);

    CHECK(out.at(4, 8) == 1.0f);                                       // on the coast
    CHECK(out.at(4, 9) == doctest::Approx(std::exp(-1.0)));            // d = 1
    CHECK(out.at(4, 6) == doctest::Approx(std::exp(-4.0)));            // d = 2
    CHECK(out.at(4, 0) == doctest::Approx(std::exp(-64.0)).scale(1.0)); // deep sea
    CHECK(out.at(4, 15) == doctest::Approx(std::exp(-49.0)).scale(1.0));

    // Sharper fields fall off faster.
    OracleConfig sharp{half_plane(16, 16, 8), 4.0, 0.0, 0};
    FloatRaster steep = oracle_predict(sharp, Head::sigmoid1, 16, {});
    CHECK(steep.at(4, 9) == doctest::Approx(std::exp(-4.0)));
    CHECK(steep.at(4, 9) < out.at(4, 9));
}

TEST_CASE("softmax oracle matches the frozen logistic values") {
    // 32 wide, 40 tall, coast along row 20.
    OracleConfig cfg{half_plane(32, 40, 20), 1.0, 0.0, 0};
    FloatRaster out = oracle_predict(cfg, Head::softmax3, 32, {});
    REQUIRE(out.channels == 3);

    // Land pixel ten rows below the coast: p_land = logistic(10).
    CHECK(out.at(16, 30, 2) == doctest::Approx(0.9999546021312976).epsilon(1e-6));
    CHECK(out.at(16, 30, 0) == doctest::Approx(1.0 - 0.9999546021312976).epsilon(1e-3));
    CHECK(out.at(16, 30, 1) == 0.0f);

    // Sea pixel ten rows above the coast mirrors it.
    CHECK(out.at(16, 10, 0) == doctest::Approx(0.9999546021312976).epsilon(1e-6));
    CHECK(out.at(16, 10, 2) == doctest::Approx(1.0 - 0.9999546021312976).epsilon(1e-3));

    // Directly on the coast the classes balance.
    CHECK(out.at(16, 20, 0) == doctest::Approx(0.5));
    CHECK(out.at(16, 20, 2) == doctest::Approx(0.5));

    // Channels always sum to one (the output covers the top 32x32 window).
    for (int y = 0; y < 32; y += 7)
        for (int x = 0; x < 32; x += 5) {
            double sum = out.at(x, y, 0) + out.at(x, y, 1) + out.at(x, y, 2);
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
        }
}

TEST_CASE("softmax oracle pins no-data pixels") {
    ClassMap truth = half_plane(8, 8, 4);
    truth.at(3, 1) = 1;
    OracleConfig cfg{truth, 1.0, 0.0, 0};
    FloatRaster out = oracle_predict(cfg, Head::softmax3, 8, {});
    CHECK(out.at(3, 1, 0) == 0.0f);
    CHECK(out.at(3, 1, 1) == 1.0f);
    CHECK(out.at(3, 1, 2) == 0.0f);
}

TEST_CASE("oracle without any coastline degrades gracefully") {
    ClassMap all_land(8, 8, 2);
    OracleConfig cfg{all_land, 1.0, 0.0, 0};
    FloatRaster sig = oracle_predict(cfg, Head::sigmoid1, 8, {});
    for (float v : sig.data)
        CHECK(v == doctest::Approx(0.0).scale(1.0));
    FloatRaster soft = oracle_predict(cfg, Head::softmax3, 8, {});
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x)
            CHECK(soft.at(x, y, 2) > 0.99f);
}

TEST_CASE("oracle noise replays from the tile's grid position") {
    OracleConfig cfg{half_plane(8, 8, 4), 1.0, 0.05, 77};
    TileContext ctx;
    ctx.scale_index = 1;
    ctx.row = 2;
    ctx.col = 3;
    FloatRaster a = oracle_predict(cfg, Head::sigmoid1, 8, ctx);
    FloatRaster b = oracle_predict(cfg, Head::sigmoid1, 8, ctx);
    CHECK(test_support::same_raster(a, b));

    TileContext other = ctx;
    other.col = 4;
    FloatRaster c = oracle_predict(cfg, Head::sigmoid1, 8, other);
    CHECK_FALSE(test_support::same_raster(a, c));

    // Replay the documented formula: one normal per pixel in row-major order
    // from stream scale_index*2^40 + row*2^20 + col, d = |y - 4| here.
    Rng rng(77, (uint64_t{1} << 40) + (uint64_t{2} << 20) + 3);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
            double d = std::abs(y - 4);
            double expected =
                std::clamp(std::exp(-d * d) + 0.05 * rng.normal(), 0.0, 1.0);
            CHECK(a.at(x, y) == static_cast<float>(expected));
        }
}

TEST_CASE("oracle configuration is validated") {
    CHECK_THROWS_WITH_AS(
        (void)Predictor(oracle_spec(half_plane(4, 4, 2), Head::sigmoid1, 0.0)),
        doctest::Contains("sharpness"), Error);
    CHECK_THROWS_WITH_AS(
        (void)Predictor(oracle_spec(half_plane(4, 4, 2), Head::sigmoid1, 1.0, -0.1)),
        doctest::Contains("noise_sigma"), Error);
    CHECK_THROWS_WITH_AS((void)Predictor(oracle_spec(ClassMap{}, Head::sigmoid1)),
                         doctest::Contains("empty truth"), Error);
    PredictorSpec bad;
    bad.ensemble_weight = -1.0;
    CHECK_THROWS_WITH_AS((void)Predictor(bad), doctest::Contains("ensemble_weight"), Error);
}

TEST_CASE("gaussian smoothing: identity, mass and separability") {
    Rng rng(55, 0);
    FloatRaster r = test_support::random_raster(rng, 9, 9, 2);

    FloatRaster same = gaussian_smooth(r, 0.0);
    CHECK(test_support::same_raster(same, r));

    FloatRaster flat(7, 7, 1, 0.375f);
    FloatRaster blurred = gaussian_smooth(flat, 1.5);
    for (float v : blurred.data)
        CHECK(v == doctest::Approx(0.375).epsilon(1e-6));

    // Impulse response equals the separable kernel product.
    FloatRaster impulse(9, 9, 1);
    impulse.at(4, 4) = 1.0f;
    const double sigma = 1.0;
    FloatRaster resp = gaussian_smooth(impulse, sigma);

    int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(static_cast<size_t>(2 * radius + 1));
    double total = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        kernel[static_cast<size_t>(k + radius)] =
            std::exp(-0.5 * k * k / (sigma * sigma));
        total += kernel[static_cast<size_t>(k + radius)];
    }
    for (double& w : kernel)
        w /= total;

    double mass = 0.0;
    for (int y = 0; y < 9; ++y)
        for (int x = 0; x < 9; ++x) {
            double want = (std::abs(x - 4) <= radius && std::abs(y - 4) <= radius)
                              ? kernel[static_cast<size_t>(x - 4 + radius)] *
                                    kernel[static_cast<size_t>(y - 4 + radius)]
                              : 0.0;
            CHECK(resp.at(x, y) == doctest::Approx(want).epsilon(1e-6).scale(1.0));
            mass += resp.at(x, y);
        }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));

    CHECK_THROWS_AS(gaussian_smooth(r, -1.0), Error);
}

TEST_CASE("tiling configuration is validated") {
    TilingConfig cfg;
    cfg.stride = cfg.tile_side + 1;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("stride"), Error);
    cfg = TilingConfig{};
    cfg.scales.clear();
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("scale list"), Error);
    cfg = TilingConfig{};
    cfg.scales = {0.5};
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = TilingConfig{};
    cfg.smoothing_sigma = -2.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("coverage mean of a constant predictor is exactly the constant") {
    PredictorSpec spec;
    spec.head = Head::sigmoid1;
    spec.backend = ConstantBackend{1.0};
    Predictor p(spec);

    TilingConfig cfg;
    cfg.tile_side = 16;
    cfg.stride = 8;
    cfg.scales = {1.0, 2.0};
    cfg.smoothing_sigma = 0.0;

    // Sizes that are and are not multiples of the tile grid.
    for (auto [w, h] : {std::pair{32, 32}, std::pair{37, 23}, std::pair{10, 10}}) {
        FloatRaster image(w, h, 1, 0.5f);
        FloatRaster out = tiled_predict(p, image, cfg);
        CHECK(out.width == w);
        CHECK(out.height == h);
        for (float v : out.data)
            CHECK(v == 1.0f);
    }

    // Smoothing keeps a constant field constant up to rounding.
    cfg.smoothing_sigma = 2.0;
    FloatRaster out = tiled_predict(p, FloatRaster(24, 24, 1, 0.0f), cfg);
    for (float v : out.data)
        CHECK(v == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("sum aggregation counts overlapping windows") {
    PredictorSpec spec;
    spec.head = Head::sigmoid1;
    spec.backend = ConstantBackend{1.0};
    Predictor p(spec);

    TilingConfig cfg;
    cfg.tile_side = 16;
    cfg.stride = 8;
    cfg.scales = {1.0};
    cfg.smoothing_sigma = 0.0;
    cfg.aggregation = Aggregation::sum;

    FloatRaster out = tiled_predict(p, FloatRaster(48, 48, 1, 0.0f), cfg);
    // Window starts are 0,8,16,24,32 per axis: corners see one window,
    // the interior two per axis.
    CHECK(out.at(0, 0) == 1.0f);
    CHECK(out.at(20, 0) == 2.0f);
    CHECK(out.at(0, 20) == 2.0f);
    CHECK(out.at(20, 20) == 4.0f);
    CHECK(out.at(47, 47) == 1.0f);
}

TEST_CASE("sum equals coverage mean when windows tile exactly") {
    PredictorSpec spec;
    spec.head = Head::softmax3;
    spec.backend = OracleBackend{OracleConfig{half_plane(32, 32, 16), 1.0, 0.02, 5}};
    Predictor p(spec);

    TilingConfig cfg;
    cfg.tile_side = 16;
    cfg.stride = 16;
    cfg.scales = {1.0};
    cfg.smoothing_sigma = 1.0;

    FloatRaster image(32, 32, 1, 0.5f);
    cfg.aggregation = Aggregation::coverage_mean;
    FloatRaster mean = tiled_predict(p, image, cfg);
    cfg.aggregation = Aggregation::sum;
    FloatRaster sum = tiled_predict(p, image, cfg);
    CHECK(test_support::same_raster(mean, sum));
}

TEST_CASE("predictions are byte-identical for any thread count") {
    PredictorSpec spec;
    spec.head = Head::softmax3;
    spec.backend = OracleBackend{OracleConfig{half_plane(40, 40, 20), 1.0, 0.1, 9}};
    Predictor p(spec);

    TilingConfig cfg;
    cfg.tile_side = 16;
    cfg.stride = 8;
    cfg.scales = {1.0, 1.7};
    cfg.smoothing_sigma = 1.0;

    FloatRaster image(40, 40, 1, 0.5f);
    FloatRaster serial = tiled_predict(p, image, cfg, 1);
    FloatRaster two = tiled_predict(p, image, cfg, 2);
    FloatRaster eight = tiled_predict(p, image, cfg, 8);
    CHECK(test_support::same_raster(serial, two));
    CHECK(test_support::same_raster(serial, eight));
}

TEST_CASE("worker failures surface as the original error") {
    PredictorSpec spec;
    spec.head = Head::sigmoid1;
    spec.backend = FileBackend{"/nonexistent/t-{scale}-{row}-{col}.fr"};
    Predictor p(spec);
    TilingConfig cfg;
    cfg.tile_side = 8;
    cfg.stride = 8;
    cfg.scales = {1.0};
    FloatRaster image(32, 32, 1, 0.5f);
    CHECK_THROWS_AS((void)tiled_predict(p, image, cfg, 4), IoError);
}

TEST_CASE("external backend round-trips tiles through a command") {
    PredictorSpec spec;
    spec.head = Head::sigmoid1;
    spec.backend = ExternalBackend{"cp"};
    Rng rng(66, 0);
    FloatRaster tile = test_support::random_raster(rng, 6, 5, 1);
    FloatRaster out = predict_tile(spec, tile);
    CHECK(test_support::same_raster(out, tile));

    spec.backend = ExternalBackend{"false"};
    CHECK_THROWS_WITH_AS(predict_tile(spec, tile),
                         doctest::Contains("external predictor failed"), Error);
}
