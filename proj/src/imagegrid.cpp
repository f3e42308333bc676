#include "pqc/imagegrid.hpp"
#include "pqc/errors.hpp"

#include <cctype>
#include <cmath>
#include <fstream>

namespace pqc {

ImageGrid::ImageGrid(int w, int h, std::vector<double> v)
    : width(w), height(h), values(std::move(v)) {
    if (w < 1 || h < 1)
        throw DimensionError("image dimensions must be at least 1x1");
    if (values.size() != static_cast<size_t>(w) * h)
        throw DimensionError("value count does not match width*height");
    for (double x : values)
        if (!std::isfinite(x))
            throw ConfigError("image values must be finite");
}

ImageGrid ImageGrid::constant(int w, int h, double value) {
    return ImageGrid(w, h, std::vector<double>(static_cast<size_t>(w) * h, value));
}

Mask::Mask(int w, int h, bool initial)
    : width(w), height(h), known(static_cast<size_t>(w) * h, initial ? 1 : 0) {
    if (w < 1 || h < 1)
        throw DimensionError("mask dimensions must be at least 1x1");
}

long Mask::count_known() const {
    long n = 0;
    for (auto b : known) n += b ? 1 : 0;
    return n;
}

std::vector<long> Mask::known_indices() const {
    std::vector<long> idx;
    for (size_t i = 0; i < known.size(); ++i)
        if (known[i]) idx.push_back(static_cast<long>(i));
    return idx;
}

std::uint8_t grey_to_byte(double v) {
    if (v <= 0.0) return 0;
    if (v >= 255.0) return 255;
    return static_cast<std::uint8_t>(std::floor(v + 0.5));
}

namespace {

// Skips whitespace and '#' comment lines between PNM header tokens.
int next_header_int(std::istream& in, const char* what) {
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    if (c == EOF || !std::isdigit(c))
        throw ParseError(std::string("expected integer for ") + what);
    long v = 0;
    while (c != EOF && std::isdigit(c)) {
        v = v * 10 + (c - '0');
        if (v > 1000000) throw ParseError(std::string(what) + " out of range");
        c = in.get();
    }
    if (c != EOF) in.unget();
    return static_cast<int>(v);
}

void expect_single_whitespace(std::istream& in) {
    int c = in.get();
    if (c == EOF || !std::isspace(c))
        throw ParseError("missing whitespace before pixel data");
}

} // namespace

ImageGrid read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (!in || m0 != 'P')
        throw ParseError("not a PNM file: " + path);
    if (m1 != '5') {
        if (m1 == '2' || m1 == '3' || m1 == '6' || m1 == '1' || m1 == '4')
            throw ParseError("unsupported PNM format P" + std::string(1, m1) + " (only binary PGM P5)");
        throw ParseError("unrecognized PNM magic");
    }
    int w = next_header_int(in, "width");
    int h = next_header_int(in, "height");
    int maxval = next_header_int(in, "maxval");
    if (w < 1 || h < 1) throw ParseError("non-positive dimensions");
    if (maxval > 255) throw ParseError("maxval > 255 not supported");
    if (maxval < 1) throw ParseError("invalid maxval");
    expect_single_whitespace(in);

    size_t n = static_cast<size_t>(w) * h;
    std::vector<std::uint8_t> bytes(n);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(n));
    if (static_cast<size_t>(in.gcount()) != n)
        throw ParseError("truncated PGM payload: expected " + std::to_string(n) +
                         " bytes, got " + std::to_string(in.gcount()));

    std::vector<double> vals(n);
    for (size_t i = 0; i < n; ++i) vals[i] = static_cast<double>(bytes[i]);
    return ImageGrid(w, h, std::move(vals));
}

void write_pgm(const ImageGrid& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    std::vector<std::uint8_t> bytes(img.size());
    for (size_t i = 0; i < img.size(); ++i) bytes[i] = grey_to_byte(img.values[i]);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + path);
}

Mask read_pbm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (!in || m0 != 'P' || m1 != '4')
        throw ParseError("not a binary PBM (P4) file: " + path);
    int w = next_header_int(in, "width");
    int h = next_header_int(in, "height");
    if (w < 1 || h < 1) throw ParseError("non-positive dimensions");
    expect_single_whitespace(in);

    Mask mask(w, h);
    size_t row_bytes = (static_cast<size_t>(w) + 7) / 8;
    std::vector<std::uint8_t> row(row_bytes);
    for (int y = 0; y < h; ++y) {
        in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row_bytes));
        if (static_cast<size_t>(in.gcount()) != row_bytes)
            throw ParseError("truncated PBM payload");
        for (int x = 0; x < w; ++x) {
            bool bit = (row[x / 8] >> (7 - (x % 8))) & 1;
            mask.set(x, y, bit);
        }
    }
    return mask;
}

void write_pbm(const Mask& mask, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "P4\n" << mask.width << " " << mask.height << "\n";
    size_t row_bytes = (static_cast<size_t>(mask.width) + 7) / 8;
    std::vector<std::uint8_t> row(row_bytes);
    for (int y = 0; y < mask.height; ++y) {
        std::fill(row.begin(), row.end(), 0);
        for (int x = 0; x < mask.width; ++x)
            if (mask.at(x, y)) row[x / 8] |= static_cast<std::uint8_t>(1u << (7 - (x % 8)));
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row_bytes));
    }
    if (!out) throw IoError("write failed for " + path);
}

double mse(const ImageGrid& a, const ImageGrid& b) {
    if (a.width != b.width || a.height != b.height)
        throw DimensionError("mse requires equal dimensions");
    double sum = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        double d = a.values[i] - b.values[i];
        sum += d * d;
    }
    return sum / static_cast<double>(a.size());
}

} // namespace pqc
