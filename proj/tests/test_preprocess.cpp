#include "doctest.h"

#include "coastline/preprocess.hpp"

#include <cmath>

using namespace coastline;

TEST_CASE("linear normalization divides by the sample maximum") {
    RasterImage img(3, 1);
    img.at(0, 0) = 0;
    img.at(1, 0) = 32768;
    img.at(2, 0) = 65535;
    FloatRaster out = normalize_linear(img);
    CHECK(out.at(0, 0) == 0.0f);
    // 32768/65535 is just over one half; frozen reference 0.5000076295109483.
    CHECK(out.at(1, 0) == doctest::Approx(0.5000076295109483).epsilon(1e-6));
    CHECK(out.at(1, 0) > 0.5f);
    CHECK(out.at(2, 0) == 1.0f);
}

TEST_CASE("log normalization matches frozen references") {
    RasterImage img(3, 1);
    img.at(0, 0) = 9;     // 81 - 83 < floor, lands on the clamp
    img.at(1, 0) = 1000;  // 10*log10(1000^2 - 83) = 59.99963952061992 dB
    img.at(2, 0) = 65535; // 96.32946599137527 dB, just short of the range top
    FloatRaster out = normalize_log(img);

    CHECK(out.at(0, 0) == 0.0f);
    CHECK(out.at(1, 0) == doctest::Approx(0.6228551803240935).epsilon(1e-6));
    CHECK(out.at(2, 0) == doctest::Approx(0.999994456466057).epsilon(1e-6));
    // The brightest sample does not quite reach the top of the window.
    CHECK(out.at(2, 0) < 1.0f);
}

TEST_CASE("log normalization honors a custom window") {
    RasterImage img(1, 1, 1000);
    PreprocessConfig cfg;
    cfg.log_range_lo = 50.0;
    cfg.log_range_hi = 60.0;
    FloatRaster out = normalize_log(img, cfg);
    // (59.99963952061992 - 50) / 10
    CHECK(out.at(0, 0) == doctest::Approx(0.999963952061992).epsilon(1e-6));

    cfg.log_range_hi = 55.0;
    out = normalize_log(img, cfg);
    CHECK(out.at(0, 0) == 1.0f); // clamped at the top

    cfg.log_range_hi = 40.0;
    CHECK_THROWS_WITH_AS(normalize_log(img, cfg), doctest::Contains("hi > lo"), Error);
    cfg = PreprocessConfig{};
    cfg.log_floor = 0.0;
    CHECK_THROWS_WITH_AS(normalize_log(img, cfg), doctest::Contains("log_floor"), Error);
}

TEST_CASE("normalize dispatches on the mode") {
    RasterImage img(1, 1, 65535);
    PreprocessConfig cfg;
    cfg.mode = PreprocessConfig::Mode::linear;
    CHECK(normalize(img, cfg).at(0, 0) == 1.0f);
    cfg.mode = PreprocessConfig::Mode::log;
    CHECK(normalize(img, cfg).at(0, 0) < 1.0f);
}

TEST_CASE("labels encode one-hot") {
    ClassMap classes(3, 1);
    classes.at(0, 0) = 0;
    classes.at(1, 0) = 1;
    classes.at(2, 0) = 2;
    FloatRaster out = encode_labels(classes);
    REQUIRE(out.channels == 3);
    for (int x = 0; x < 3; ++x)
        for (int c = 0; c < 3; ++c)
            CHECK(out.at(x, 0, c) == (c == x ? 1.0f : 0.0f));

    classes.at(1, 0) = 5;
    CHECK_THROWS_WITH_AS(encode_labels(classes), doctest::Contains("out of {0,1,2}"), Error);
}

TEST_CASE("coastline channel carries the triangular kernel") {
    // Single coast pixel in the middle of a 9x9 sea.
    CoastMask coast(9, 9);
    coast.at(4, 4) = 1;
    LabelSmoothingConfig cfg; // radius 2, peak 1
    FloatRaster s = smooth_labels(coast, cfg);

    CHECK(s.at(4, 4) == 1.0f);
    // One step away (axis or diagonal, Chebyshev) drops to 2/3.
    CHECK(s.at(5, 4) == doctest::Approx(2.0 / 3.0));
    CHECK(s.at(3, 3) == doctest::Approx(2.0 / 3.0));
    CHECK(s.at(4, 6) == doctest::Approx(1.0 / 3.0));
    CHECK(s.at(6, 6) == doctest::Approx(1.0 / 3.0));
    // Radius+1 steps away the kernel has run out.
    CHECK(s.at(7, 4) == 0.0f);
    CHECK(s.at(7, 7) == 0.0f);
    CHECK(s.at(0, 0) == 0.0f);

    cfg.peak = 0.5;
    s = smooth_labels(coast, cfg);
    CHECK(s.at(4, 4) == 0.5f);
    CHECK(s.at(5, 5) == doctest::Approx(1.0 / 3.0));

    cfg.peak = 1.5;
    CHECK_THROWS_AS(smooth_labels(coast, cfg), Error);
}

TEST_CASE("smoothing takes the nearest of several coast pixels") {
    CoastMask coast(7, 3);
    coast.at(1, 1) = 1;
    coast.at(5, 1) = 1;
    FloatRaster s = smooth_labels(coast, LabelSmoothingConfig{});
    CHECK(s.at(3, 1) == doctest::Approx(1.0 / 3.0)); // two steps from both
    CHECK(s.at(2, 1) == doctest::Approx(2.0 / 3.0)); // one step from the left pixel
    CHECK(s.at(6, 1) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("four-channel encoding stacks classes and smoothed coast") {
    ClassMap classes(3, 1);
    classes.at(0, 0) = 0;
    classes.at(1, 0) = 2;
    classes.at(2, 0) = 2;
    CoastMask coast(3, 1);
    coast.at(1, 0) = 1;
    FloatRaster out = encode_labels(classes, coast, LabelSmoothingConfig{});
    REQUIRE(out.channels == 4);
    CHECK(out.at(0, 0, 0) == 1.0f);
    CHECK(out.at(1, 0, 2) == 1.0f);
    CHECK(out.at(1, 0, 3) == 1.0f);
    CHECK(out.at(0, 0, 3) == doctest::Approx(2.0 / 3.0));
    CHECK(out.at(2, 0, 3) == doctest::Approx(2.0 / 3.0));

    CoastMask wrong(2, 1);
    CHECK_THROWS_WITH_AS(encode_labels(classes, wrong, LabelSmoothingConfig{}),
                         doctest::Contains("dimensions differ"), Error);
}

TEST_CASE("crop counting matches the closed form") {
    CHECK(count_unique_crops(1536, 1280, 512, 512) == 786432u);
    CHECK(count_unique_crops(3, 3, 1, 1) == 4u);
    CHECK(count_unique_crops(5, 5, 5, 5) == 0u); // crop spans the full image
    CHECK_THROWS_WITH_AS(count_unique_crops(4, 4, 5, 4),
                         doctest::Contains("crop larger than image"), Error);
    CHECK_THROWS_AS(count_unique_crops(0, 4, 1, 1), Error);
}
