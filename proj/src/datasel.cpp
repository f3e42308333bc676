#include "pqc/datasel.hpp"
#include "pqc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace pqc {

void SparsifyConfig::validate() const {
    if (!(target_density > 0.0 && target_density < 1.0))
        throw ConfigError("target_density must lie in (0,1)");
    if (!(candidate_fraction > 0.0 && candidate_fraction <= 1.0))
        throw ConfigError("candidate_fraction must lie in (0,1]");
}

namespace {

// Predicted local squared error on the candidate's 8-neighbourhood if it
// were removed: the candidate's value is replaced by the mean of the
// current reconstruction over its 4-neighbours.
double removal_score(const ImageGrid& image, const ImageGrid& u, int cx, int cy) {
    double nsum = 0.0;
    int ncount = 0;
    if (cx > 0) { nsum += u.at(cx - 1, cy); ++ncount; }
    if (cx < u.width - 1) { nsum += u.at(cx + 1, cy); ++ncount; }
    if (cy > 0) { nsum += u.at(cx, cy - 1); ++ncount; }
    if (cy < u.height - 1) { nsum += u.at(cx, cy + 1); ++ncount; }
    double predicted = ncount > 0 ? nsum / ncount : u.at(cx, cy);

    double err = 0.0;
    for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
            int x = cx + dx, y = cy + dy;
            if (x < 0 || y < 0 || x >= u.width || y >= u.height) continue;
            double val = (dx == 0 && dy == 0) ? predicted : u.at(x, y);
            double d = val - image.at(x, y);
            err += d * d;
        }
    }
    return err;
}

} // namespace

Mask sparsify_mask(const ImageGrid& image, const SparsifyConfig& config) {
    config.validate();
    long n = static_cast<long>(image.size());
    long target = std::lround(config.target_density * n);
    target = std::max(1L, std::min(target, n - 1));

    Mask mask(image.width, image.height, true);
    long current = n;
    std::mt19937_64 rng(config.seed);

    while (current > target) {
        // one re-solve per round; with the full mask this is the image itself
        ImageGrid u = image;
        if (current < n) {
            InpaintProblem p{image, mask, 1e-8, 0};
            u = solve(p);
        }

        std::vector<long> known = mask.known_indices();
        std::shuffle(known.begin(), known.end(), rng);
        long n_cand = std::max(1L, std::lround(config.candidate_fraction * current));
        n_cand = std::min(n_cand, static_cast<long>(known.size()));

        std::vector<std::pair<double, long>> scored;
        scored.reserve(n_cand);
        for (long i = 0; i < n_cand; ++i) {
            long pix = known[i];
            int x = static_cast<int>(pix % image.width);
            int y = static_cast<int>(pix / image.width);
            scored.emplace_back(removal_score(image, u, x, y), pix);
        }
        std::sort(scored.begin(), scored.end());

        long per_round = std::max(1L, current / 10);
        long to_remove = std::min({per_round, current - target,
                                   static_cast<long>(scored.size())});
        for (long i = 0; i < to_remove; ++i) {
            long pix = scored[i].second;
            mask.known[pix] = 0;
        }
        current -= to_remove;
    }
    return mask;
}

TonalResult optimize_tonal(const ImageGrid& image, const Mask& mask,
                           const InfluenceBasis& basis, double tolerance) {
    size_t m = basis.count();
    if (basis.pixel_indices != mask.known_indices() ||
        basis.width != image.width || basis.height != image.height)
        throw DimensionError("influence basis does not match mask/image");

    size_t npix = image.size();
    auto apply_B = [&](const std::vector<double>& g) { return basis.combine(g); };
    auto apply_Bt = [&](const ImageGrid& r) {
        std::vector<double> out(m);
        for (size_t i = 0; i < m; ++i) {
            double s = 0.0;
            const auto& f = basis.fields[i].values;
            for (size_t p = 0; p < npix; ++p) s += f[p] * r.values[p];
            out[i] = s;
        }
        return out;
    };

    // CG on the normal equations B^T B g = B^T f, started from the original
    // mask values.
    std::vector<double> g(m);
    for (size_t i = 0; i < m; ++i) g[i] = image.values[basis.pixel_indices[i]];

    std::vector<double> bt_f = apply_Bt(image);
    double bnorm = 0.0;
    for (double v : bt_f) bnorm += v * v;
    bnorm = std::sqrt(bnorm);

    auto apply_BtB = [&](const std::vector<double>& v) { return apply_Bt(apply_B(v)); };

    std::vector<double> r = apply_BtB(g);
    for (size_t i = 0; i < m; ++i) r[i] = bt_f[i] - r[i];
    std::vector<double> p = r;
    double rr = std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
    long max_iters = static_cast<long>(10 * m + 100);
    long it = 0;
    for (; it < max_iters; ++it) {
        if (std::sqrt(rr) <= tolerance * std::max(bnorm, 1e-30)) break;
        std::vector<double> Ap = apply_BtB(p);
        double pAp = std::inner_product(p.begin(), p.end(), Ap.begin(), 0.0);
        if (pAp <= 0.0) break;
        double alpha = rr / pAp;
        for (size_t i = 0; i < m; ++i) {
            g[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        double rr_new = std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
        double beta = rr_new / rr;
        rr = rr_new;
        for (size_t i = 0; i < m; ++i) p[i] = r[i] + beta * p[i];
    }
    if (std::sqrt(rr) > tolerance * std::max(bnorm, 1e-30))
        throw SolverError("tonal optimization did not converge",
                          std::sqrt(rr) / std::max(bnorm, 1e-30));

    TonalResult result;
    result.grey_values = std::move(g);
    result.iterations = it;
    result.achieved_mse = mse(apply_B(result.grey_values), image);
    return result;
}

TonalResult optimize_tonal_quantized(const ImageGrid& image, const Mask& mask,
                                     const InfluenceBasis& basis,
                                     const QuantTable& levels, int max_sweeps) {
    if (levels.levels.empty())
        throw ConfigError("level set must be non-empty");
    size_t m = basis.count();
    if (basis.pixel_indices != mask.known_indices() ||
        basis.width != image.width || basis.height != image.height)
        throw DimensionError("influence basis does not match mask/image");
    size_t npix = image.size();

    // start from the original mask values snapped to the nearest level
    std::vector<double> orig(m);
    for (size_t i = 0; i < m; ++i) orig[i] = image.values[basis.pixel_indices[i]];
    std::vector<int> idx = quantize(orig, levels);
    std::vector<double> g(m);
    for (size_t i = 0; i < m; ++i) g[i] = levels.levels[idx[i]];

    // residual r = B g - f, squared-norm trial updates via the basis fields
    ImageGrid recon = basis.combine(g);
    std::vector<double> residual(npix);
    for (size_t p = 0; p < npix; ++p) residual[p] = recon.values[p] - image.values[p];
    std::vector<double> basis_norm2(m);
    for (size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (double v : basis.fields[i].values) s += v * v;
        basis_norm2[i] = s;
    }

    long sweeps = 0;
    for (; sweeps < max_sweeps; ++sweeps) {
        bool changed = false;
        for (size_t i = 0; i < m; ++i) {
            const auto& Bi = basis.fields[i].values;
            double rb = 0.0;
            for (size_t p = 0; p < npix; ++p) rb += residual[p] * Bi[p];
            // ||r + t B_i||^2 - ||r||^2 = 2 t <r,B_i> + t^2 ||B_i||^2 with
            // t = level - g_i; ties toward the lower grey value
            double best_delta = 0.0;
            double best_level = g[i];
            for (double level : levels.levels) {
                double t = level - g[i];
                double delta = 2.0 * t * rb + t * t * basis_norm2[i];
                if (delta < best_delta - 1e-12 ||
                    (std::abs(delta - best_delta) <= 1e-12 && level < best_level)) {
                    best_delta = delta;
                    best_level = level;
                }
            }
            if (best_level != g[i]) {
                double t = best_level - g[i];
                for (size_t p = 0; p < npix; ++p) residual[p] += t * Bi[p];
                g[i] = best_level;
                changed = true;
            }
        }
        if (!changed) break;
    }

    TonalResult result;
    result.grey_values = std::move(g);
    result.iterations = sweeps;
    double ss = 0.0;
    for (double v : residual) ss += v * v;
    result.achieved_mse = ss / static_cast<double>(npix);
    return result;
}

} // namespace pqc
