#pragma once

#include "pqc/imagegrid.hpp"

#include <cmath>
#include <random>

namespace fixtures {

// Deterministic 64x64 byte-valued test image with smooth regions, a low
// frequency texture and a hard edge. The texture is gentle enough that a 5%
// random mask reconstructs the image reasonably well; quantization effects
// then dominate the error differences between palette sizes.
inline pqc::ImageGrid textured64() {
    int n = 64;
    std::vector<double> vals(static_cast<size_t>(n) * n);
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            double v = 110.0 + 35.0 * std::sin(2.0 * M_PI * x / 25.0) *
                                   std::sin(2.0 * M_PI * y / 29.0);
            v += 70.0 * x / (n - 1.0);
            if ((x - 16) * (x - 16) + (y - 44) * (y - 44) < 90) v += 35.0;
            v = std::clamp(v, 0.0, 255.0);
            vals[static_cast<size_t>(y) * n + x] = std::floor(v + 0.5);
        }
    }
    return pqc::ImageGrid(n, n, std::move(vals));
}

inline pqc::ImageGrid random_image(int w, int h, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 255.0);
    std::vector<double> vals(static_cast<size_t>(w) * h);
    for (auto& v : vals) v = std::floor(u(rng));
    return pqc::ImageGrid(w, h, std::move(vals));
}

// Smooth random image: a few random low-frequency cosines, byte rounded.
// Histograms come out skewed, like natural images.
inline pqc::ImageGrid smooth_random_image(int w, int h, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> amp(10.0, 60.0);
    std::uniform_real_distribution<double> freq(0.5, 3.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    struct Wave { double a, fx, fy, p; };
    std::vector<Wave> waves;
    for (int i = 0; i < 4; ++i)
        waves.push_back({amp(rng), freq(rng), freq(rng), phase(rng)});
    std::vector<double> vals(static_cast<size_t>(w) * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double v = 128.0;
            for (const auto& wv : waves)
                v += wv.a * std::cos(2.0 * M_PI * (wv.fx * x / w + wv.fy * y / h) + wv.p);
            vals[static_cast<size_t>(y) * w + x] = std::floor(std::clamp(v, 0.0, 255.0) + 0.5);
        }
    return pqc::ImageGrid(w, h, std::move(vals));
}

// Random mask with at least one known and one unknown pixel.
inline pqc::Mask random_mask(int w, int h, double density, std::mt19937_64& rng) {
    std::bernoulli_distribution pick(density);
    pqc::Mask mask(w, h);
    for (auto& b : mask.known) b = pick(rng) ? 1 : 0;
    long known = mask.count_known();
    std::uniform_int_distribution<size_t> any(0, mask.size() - 1);
    if (known == 0) mask.known[any(rng)] = 1;
    // single-pixel grids stay all-known: unsetting would empty the mask
    if (known == static_cast<long>(mask.size()) && mask.size() > 1)
        mask.known[any(rng)] = 0;
    return mask;
}

} // namespace fixtures
