#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pqc {

// Grey value raster, row-major, real valued. Nominal range [0,255];
// quantization to bytes happens only at file and codec boundaries.
struct ImageGrid {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    ImageGrid() = default;
    ImageGrid(int w, int h, std::vector<double> v);
    static ImageGrid constant(int w, int h, double value);

    double& at(int x, int y) { return values[static_cast<size_t>(y) * width + x]; }
    double at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
    size_t size() const { return values.size(); }
};

// Known-data set: true marks pixels whose values are stored.
struct Mask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> known;

    Mask() = default;
    Mask(int w, int h, bool initial = false);

    bool at(int x, int y) const { return known[static_cast<size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { known[static_cast<size_t>(y) * width + x] = v ? 1 : 0; }
    size_t size() const { return known.size(); }
    long count_known() const;

    // Linear (row-major) indices of known pixels, ascending.
    std::vector<long> known_indices() const;
};

// Clamp to [0,255] and round half away from zero.
std::uint8_t grey_to_byte(double v);

ImageGrid read_pgm(const std::string& path);
void write_pgm(const ImageGrid& img, const std::string& path);

Mask read_pbm(const std::string& path);
void write_pbm(const Mask& mask, const std::string& path);

double mse(const ImageGrid& a, const ImageGrid& b);

} // namespace pqc
