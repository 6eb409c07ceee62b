#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace coastline {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// 16-bit single-channel intensity grid, row-major.
struct RasterImage {
    int width = 0;
    int height = 0;
    std::vector<uint16_t> data;

    RasterImage() = default;
    RasterImage(int w, int h, uint16_t fill = 0);

    uint16_t at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
    uint16_t& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
    size_t pixel_count() const { return static_cast<size_t>(width) * height; }
};

/// Row-major, channel-interleaved 32-bit float raster (1 to 4 channels).
/// Pixel (x,y) channel c lives at offset (y*width + x)*channels + c.
struct FloatRaster {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<float> data;

    FloatRaster() = default;
    FloatRaster(int w, int h, int c = 1, float fill = 0.0f);

    size_t index(int x, int y, int c = 0) const {
        return (static_cast<size_t>(y) * width + x) * channels + c;
    }
    float at(int x, int y, int c = 0) const { return data[index(x, y, c)]; }
    float& at(int x, int y, int c = 0) { return data[index(x, y, c)]; }
    size_t pixel_count() const { return static_cast<size_t>(width) * height; }
};

/// Per-pixel class labels: 0=sea, 1=no-data, 2=land.
struct ClassMap {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> data;

    ClassMap() = default;
    ClassMap(int w, int h, uint8_t fill = 0);

    uint8_t at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
    uint8_t& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
};

/// Binary coastline mask, 1 = coastline pixel.
struct CoastMask {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> data;

    CoastMask() = default;
    CoastMask(int w, int h, uint8_t fill = 0);

    uint8_t at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
    uint8_t& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
};

enum class Orientation { landscape, portrait };

struct PathEntry {
    double coord = 0.0;
    bool present = false;
};

/// Per-column (landscape) or per-row (portrait) coastline coordinates.
/// entries[i] holds the secondary-axis coordinate at primary-axis index i.
struct CoastlinePath {
    Orientation orientation = Orientation::landscape;
    std::vector<PathEntry> entries;

    CoastlinePath() = default;
    CoastlinePath(Orientation o, int length) : orientation(o), entries(length) {}

    int length() const { return static_cast<int>(entries.size()); }
};

struct EvaluationPoint {
    double x = 0.0;
    double y = 0.0;
};

// PGM P5, canonical form "P5\n<w> <h>\n65535\n" + big-endian u16 samples.
// The reader also tolerates comments and extra whitespace in the header.
RasterImage read_pgm(const std::string& path);
void write_pgm(const RasterImage& img, const std::string& path);

// Class maps and coast masks ride on PGM with fixed value anchors:
// class 0/1/2 -> 0/32767/65535, mask 0/1 -> 0/65535.
ClassMap read_class_pgm(const std::string& path);
void write_class_pgm(const ClassMap& map, const std::string& path);
CoastMask read_mask_pgm(const std::string& path);
void write_mask_pgm(const CoastMask& mask, const std::string& path);

// Float raster exchange format: ASCII line "FR <w> <h> <c>\n" followed by
// w*h*c little-endian IEEE-754 f32, row-major, channel-interleaved.
FloatRaster read_float_raster(const std::string& path);
void write_float_raster(const FloatRaster& r, const std::string& path);

// Coastline CSV. Landscape: header "x,y", rows "<integer x>,<decimal y>";
// a missed column is "<x>," with an empty second field. Portrait swaps the
// roles and the header is "y,x". Skipped indices read back as absent.
CoastlinePath read_coastline_csv(const std::string& path);
void write_coastline_csv(const CoastlinePath& path_data, const std::string& path);

// Evaluation points CSV: header "x,y", decimal coordinates.
std::vector<EvaluationPoint> read_points_csv(const std::string& path);
void write_points_csv(const std::vector<EvaluationPoint>& points, const std::string& path);

} // namespace coastline
