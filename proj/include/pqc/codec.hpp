#pragma once

#include "pqc/imagegrid.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pqc {

struct Clustering; // clusterlab

enum class QuantKind : std::uint8_t { Equidistant = 0, Clustered = 1 };

// Ordered set of representable grey values.
struct QuantTable {
    std::vector<double> levels;  // strictly increasing, within [0,255]
    QuantKind kind = QuantKind::Equidistant;

    int k() const { return static_cast<int>(levels.size()); }
};

QuantTable make_equidistant(int k);

// Levels from sorted 1-D centroids, clamped to [0,255] and de-duplicated
// after byte rounding (k may shrink).
QuantTable make_clustered(const Clustering& clustering);

// Nearest level per value; ties toward the lower index.
std::vector<int> quantize(const std::vector<double>& values, const QuantTable& table);

struct EncodedPayload {
    int width = 0;
    int height = 0;
    QuantTable table;                 // byte-rounded levels as stored
    std::vector<std::uint8_t> bytes;  // full container

    size_t total_bytes() const { return bytes.size(); }
};

// Container: mask coded with a context-adaptive binary coder (west+north
// neighbour context), level indices with an order-0 adaptive coder.
EncodedPayload encode(const std::vector<double>& mask_values, const Mask& mask,
                      const QuantTable& table);

struct DecodedData {
    Mask mask;
    std::vector<int> indices;     // per mask pixel, row-major
    std::vector<double> values;   // level value per mask pixel
    QuantTable table;
};

DecodedData decode(const std::vector<std::uint8_t>& bytes);

double compression_ratio(const EncodedPayload& payload);

std::uint32_t crc32(const std::uint8_t* data, size_t size);

} // namespace pqc
