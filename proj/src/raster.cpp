#include "coastline/raster.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace coastline {

namespace {

void check_dims(int w, int h, const char* what) {
    if (w < 1 || h < 1)
        throw Error(std::string(what) + ": dimensions must be at least 1x1");
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError(path + ": cannot open file");
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError(path + ": cannot open file for writing");
    return out;
}

// Reads one PGM header token, skipping whitespace and '#' comments.
std::string pnm_token(std::istream& in) {
    int c = in.get();
    while (c != EOF && (std::isspace(c) || c == '#')) {
        if (c == '#') {
            while (c != EOF && c != '\n')
                c = in.get();
        }
        c = in.get();
    }
    std::string tok;
    while (c != EOF && !std::isspace(c)) {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    return tok;
}

int parse_int_token(const std::string& tok, const std::string& path) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw Error(path + ": malformed PGM header");
    return value;
}

uint16_t class_anchor(uint8_t cls) {
    switch (cls) {
    case 0: return 0;
    case 1: return 32767;
    case 2: return 65535;
    default: throw Error("class map value out of {0,1,2}");
    }
}

} // namespace

RasterImage::RasterImage(int w, int h, uint16_t fill) : width(w), height(h) {
    check_dims(w, h, "RasterImage");
    data.assign(static_cast<size_t>(w) * h, fill);
}

FloatRaster::FloatRaster(int w, int h, int c, float fill) : width(w), height(h), channels(c) {
    check_dims(w, h, "FloatRaster");
    if (c < 1 || c > 4)
        throw Error("FloatRaster: unsupported channel count " + std::to_string(c));
    data.assign(static_cast<size_t>(w) * h * c, fill);
}

ClassMap::ClassMap(int w, int h, uint8_t fill) : width(w), height(h) {
    check_dims(w, h, "ClassMap");
    if (fill > 2)
        throw Error("ClassMap: fill value out of {0,1,2}");
    data.assign(static_cast<size_t>(w) * h, fill);
}

CoastMask::CoastMask(int w, int h, uint8_t fill) : width(w), height(h) {
    check_dims(w, h, "CoastMask");
    if (fill > 1)
        throw Error("CoastMask: fill value out of {0,1}");
    data.assign(static_cast<size_t>(w) * h, fill);
}

RasterImage read_pgm(const std::string& path) {
    auto in = open_input(path);
    if (pnm_token(in) != "P5")
        throw Error(path + ": not a binary PGM (P5) file");
    int w = parse_int_token(pnm_token(in), path);
    int h = parse_int_token(pnm_token(in), path);
    int maxval = parse_int_token(pnm_token(in), path);
    if (w < 1 || h < 1)
        throw Error(path + ": malformed PGM header");
    if (maxval != 65535)
        throw Error(path + ": expected maxval 65535, got " + std::to_string(maxval));

    RasterImage img(w, h);
    std::vector<char> raw(img.pixel_count() * 2);
    in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
    if (static_cast<size_t>(in.gcount()) != raw.size())
        throw Error(path + ": truncated payload");
    for (size_t i = 0; i < img.pixel_count(); ++i) {
        auto hi = static_cast<uint8_t>(raw[2 * i]);
        auto lo = static_cast<uint8_t>(raw[2 * i + 1]);
        img.data[i] = static_cast<uint16_t>((hi << 8) | lo);
    }
    return img;
}

void write_pgm(const RasterImage& img, const std::string& path) {
    check_dims(img.width, img.height, "write_pgm");
    if (img.data.size() != img.pixel_count())
        throw Error("write_pgm: data length does not match dimensions");
    auto out = open_output(path);
    out << "P5\n" << img.width << " " << img.height << "\n65535\n";
    std::vector<char> raw(img.pixel_count() * 2);
    for (size_t i = 0; i < img.pixel_count(); ++i) {
        raw[2 * i] = static_cast<char>(img.data[i] >> 8);
        raw[2 * i + 1] = static_cast<char>(img.data[i] & 0xff);
    }
    out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
    if (!out)
        throw IoError(path + ": write failed");
}

ClassMap read_class_pgm(const std::string& path) {
    RasterImage img = read_pgm(path);
    ClassMap map(img.width, img.height);
    for (size_t i = 0; i < img.data.size(); ++i) {
        switch (img.data[i]) {
        case 0: map.data[i] = 0; break;
        case 32767: map.data[i] = 1; break;
        case 65535: map.data[i] = 2; break;
        default:
            throw Error(path + ": value " + std::to_string(img.data[i]) +
                        " is not a class anchor (0, 32767, 65535)");
        }
    }
    return map;
}

void write_class_pgm(const ClassMap& map, const std::string& path) {
    RasterImage img(map.width, map.height);
    for (size_t i = 0; i < map.data.size(); ++i)
        img.data[i] = class_anchor(map.data[i]);
    write_pgm(img, path);
}

CoastMask read_mask_pgm(const std::string& path) {
    RasterImage img = read_pgm(path);
    CoastMask mask(img.width, img.height);
    for (size_t i = 0; i < img.data.size(); ++i) {
        if (img.data[i] == 0)
            mask.data[i] = 0;
        else if (img.data[i] == 65535)
            mask.data[i] = 1;
        else
            throw Error(path + ": value " + std::to_string(img.data[i]) +
                        " is not a mask anchor (0, 65535)");
    }
    return mask;
}

void write_mask_pgm(const CoastMask& mask, const std::string& path) {
    RasterImage img(mask.width, mask.height);
    for (size_t i = 0; i < mask.data.size(); ++i)
        img.data[i] = mask.data[i] ? 65535 : 0;
    write_pgm(img, path);
}

FloatRaster read_float_raster(const std::string& path) {
    auto in = open_input(path);
    std::string header;
    if (!std::getline(in, header))
        throw Error(path + ": missing header line");
    std::istringstream hs(header);
    std::string magic;
    int w = 0, h = 0, c = 0;
    if (!(hs >> magic >> w >> h >> c) || magic != "FR")
        throw Error(path + ": malformed float raster header");
    if (w < 1 || h < 1)
        throw Error(path + ": malformed float raster header");
    if (c < 1 || c > 4)
        throw Error(path + ": unsupported channel count " + std::to_string(c));

    FloatRaster r(w, h, c);
    std::vector<char> raw(r.data.size() * 4);
    in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
    if (static_cast<size_t>(in.gcount()) != raw.size())
        throw Error(path + ": truncated payload");
    for (size_t i = 0; i < r.data.size(); ++i) {
        uint32_t bits = static_cast<uint8_t>(raw[4 * i]) |
                        (static_cast<uint32_t>(static_cast<uint8_t>(raw[4 * i + 1])) << 8) |
                        (static_cast<uint32_t>(static_cast<uint8_t>(raw[4 * i + 2])) << 16) |
                        (static_cast<uint32_t>(static_cast<uint8_t>(raw[4 * i + 3])) << 24);
        r.data[i] = std::bit_cast<float>(bits);
        if (!std::isfinite(r.data[i]))
            throw Error(path + ": non-finite value at element " + std::to_string(i));
    }
    return r;
}

void write_float_raster(const FloatRaster& r, const std::string& path) {
    check_dims(r.width, r.height, "write_float_raster");
    if (r.channels < 1 || r.channels > 4)
        throw Error("write_float_raster: unsupported channel count");
    if (r.data.size() != r.pixel_count() * r.channels)
        throw Error("write_float_raster: data length does not match dimensions");
    auto out = open_output(path);
    out << "FR " << r.width << " " << r.height << " " << r.channels << "\n";
    std::vector<char> raw(r.data.size() * 4);
    for (size_t i = 0; i < r.data.size(); ++i) {
        auto bits = std::bit_cast<uint32_t>(r.data[i]);
        raw[4 * i] = static_cast<char>(bits & 0xff);
        raw[4 * i + 1] = static_cast<char>((bits >> 8) & 0xff);
        raw[4 * i + 2] = static_cast<char>((bits >> 16) & 0xff);
        raw[4 * i + 3] = static_cast<char>((bits >> 24) & 0xff);
    }
    out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
    if (!out)
        throw IoError(path + ": write failed");
}

namespace {

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc())
        throw Error("cannot format value");
    return std::string(buf, ptr);
}

double parse_double(std::string_view text, const std::string& path, size_t line_no) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value))
        throw Error(path + ":" + std::to_string(line_no) + ": malformed coordinate");
    return value;
}

} // namespace

CoastlinePath read_coastline_csv(const std::string& path) {
    auto in = open_input(path);
    std::string line;
    if (!std::getline(in, line))
        throw Error(path + ": empty file");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();

    CoastlinePath result;
    if (line == "x,y")
        result.orientation = Orientation::landscape;
    else if (line == "y,x")
        result.orientation = Orientation::portrait;
    else
        throw Error(path + ": expected header \"x,y\" or \"y,x\", got \"" + line + "\"");

    long last_index = -1;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw Error(path + ":" + std::to_string(line_no) + ": missing comma");
        long index = 0;
        auto [ptr, ec] = std::from_chars(line.data(), line.data() + comma, index);
        if (ec != std::errc() || ptr != line.data() + comma || index < 0)
            throw Error(path + ":" + std::to_string(line_no) + ": malformed index");
        if (index <= last_index)
            throw Error(path + ":" + std::to_string(line_no) +
                        ": primary-axis index not strictly increasing");
        // Skipped indices are absent entries.
        result.entries.resize(static_cast<size_t>(index) + 1);
        std::string_view coord_text(line.data() + comma + 1, line.size() - comma - 1);
        if (!coord_text.empty()) {
            double coord = parse_double(coord_text, path, line_no);
            if (coord < 0.0)
                throw Error(path + ":" + std::to_string(line_no) + ": coordinate out of range");
            result.entries[static_cast<size_t>(index)] = PathEntry{coord, true};
        }
        last_index = index;
    }
    return result;
}

void write_coastline_csv(const CoastlinePath& path_data, const std::string& path) {
    auto out = open_output(path);
    out << (path_data.orientation == Orientation::landscape ? "x,y\n" : "y,x\n");
    for (int i = 0; i < path_data.length(); ++i) {
        const PathEntry& e = path_data.entries[static_cast<size_t>(i)];
        out << i << ",";
        if (e.present)
            out << format_double(e.coord);
        out << "\n";
    }
    if (!out)
        throw IoError(path + ": write failed");
}

std::vector<EvaluationPoint> read_points_csv(const std::string& path) {
    auto in = open_input(path);
    std::string line;
    if (!std::getline(in, line))
        throw Error(path + ": empty file");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != "x,y")
        throw Error(path + ": expected header \"x,y\"");

    std::vector<EvaluationPoint> points;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw Error(path + ":" + std::to_string(line_no) + ": missing comma");
        EvaluationPoint p;
        p.x = parse_double(std::string_view(line.data(), comma), path, line_no);
        p.y = parse_double(std::string_view(line.data() + comma + 1, line.size() - comma - 1),
                           path, line_no);
        points.push_back(p);
    }
    return points;
}

void write_points_csv(const std::vector<EvaluationPoint>& points, const std::string& path) {
    auto out = open_output(path);
    out << "x,y\n";
    for (const auto& p : points)
        out << format_double(p.x) << "," << format_double(p.y) << "\n";
    if (!out)
        throw IoError(path + ": write failed");
}

} // namespace coastline
