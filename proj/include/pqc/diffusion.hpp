#pragma once

#include "pqc/imagegrid.hpp"

#include <vector>

namespace pqc {

// Homogeneous diffusion inpainting: u = f on mask pixels, 5-point discrete
// Laplacian vanishes on unknown pixels, reflecting outer boundary.
struct InpaintProblem {
    ImageGrid image;
    Mask mask;
    double tolerance = 1e-10;   // relative residual bound
    long max_iterations = 0;    // 0 selects 50 * pixel count

    void validate() const;
};

ImageGrid solve(const InpaintProblem& problem);

// Per-mask-pixel unit reconstructions. By linearity, the reconstruction of
// grey data g is sum_i g_i * field[i].
struct InfluenceBasis {
    int width = 0;
    int height = 0;
    std::vector<long> pixel_indices;     // row-major linear index per mask pixel
    std::vector<ImageGrid> fields;       // one reconstruction per mask pixel

    size_t count() const { return fields.size(); }

    // Sum of g_i * field_i; g ordered like pixel_indices.
    ImageGrid combine(const std::vector<double>& g) const;
};

InfluenceBasis influence_basis(const Mask& mask, double tolerance = 1e-10,
                               long max_iterations = 0,
                               long long entry_budget = 200000000LL);

} // namespace pqc
