#pragma once

#include "pqc/codec.hpp"
#include "pqc/diffusion.hpp"
#include "pqc/imagegrid.hpp"

#include <cstdint>

namespace pqc {

// Stochastic mask sparsification. Starts from the full mask and removes the
// least harmful candidates round by round until the target density is hit.
struct SparsifyConfig {
    double target_density = 0.05;   // in (0,1)
    double candidate_fraction = 0.5; // fraction of the current mask tested per round
    std::uint64_t seed = 0;

    void validate() const;
};

Mask sparsify_mask(const ImageGrid& image, const SparsifyConfig& config);

struct TonalResult {
    std::vector<double> grey_values;  // one per mask pixel, basis order
    double achieved_mse = 0.0;
    long iterations = 0;
};

// Continuous grey value optimization: least squares fit of the influence
// basis combination to the original image.
TonalResult optimize_tonal(const ImageGrid& image, const Mask& mask,
                           const InfluenceBasis& basis, double tolerance = 1e-8);

// Greedy quantization-aware variant: coordinate descent over mask pixels,
// each restricted to the level set, until a sweep changes nothing.
TonalResult optimize_tonal_quantized(const ImageGrid& image, const Mask& mask,
                                     const InfluenceBasis& basis,
                                     const QuantTable& levels, int max_sweeps = 50);

} // namespace pqc
