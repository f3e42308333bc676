// Acceptance suite: one test case per criterion, each printing a single
// PASS/FAIL line so the overall gate is readable from the ctest log.

#include <doctest.h>

#include "pqc/clusterlab.hpp"
#include "pqc/codec.hpp"
#include "pqc/datasel.hpp"
#include "pqc/diffusion.hpp"
#include "pqc/imagegrid.hpp"
#include "pqc/indices.hpp"
#include "pqc/pipeline.hpp"
#include "pqc/rangecoder.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>

using namespace pqc;

namespace {

void report(int num, const char* name, bool ok) {
    std::printf("[acceptance] criterion %2d: %s  (%s)\n", num, ok ? "PASS" : "FAIL", name);
    std::fflush(stdout);
}

// Shared fixture: the 64x64 textured image with a 5% stochastically
// sparsified mask, used by criteria 4, 8 and 9.
const ImageGrid& fixture_image() {
    static ImageGrid img = fixtures::textured64();
    return img;
}

const Mask& fixture_mask() {
    static Mask mask = [] {
        SparsifyConfig cfg;
        cfg.target_density = 0.05;
        cfg.seed = 42;
        return sparsify_mask(fixture_image(), cfg);
    }();
    return mask;
}

std::vector<double> fixture_mask_values() {
    std::vector<double> v;
    for (long pix : fixture_mask().known_indices())
        v.push_back(fixture_image().values[pix]);
    return v;
}

double plain_fixture_mse() {
    static double value =
        mse(solve({fixture_image(), fixture_mask(), 1e-10, 0}), fixture_image());
    return value;
}

// Reconstruction error after quantizing the fixture's mask values with k
// cluster-based levels and passing them through the codec.
double fixture_mse_at_k(int k, std::map<int, double>& cache) {
    auto it = cache.find(k);
    if (it != cache.end()) return it->second;
    CompressOptions opt;
    opt.image = fixture_image();
    opt.mask = fixture_mask();
    opt.quant = "kmeans";
    opt.feature = 4;
    opt.k = k;
    opt.seed = 1;
    double v = run_compress(opt).mse_value;
    cache[k] = v;
    return v;
}

long fixture_unique_colours() {
    std::set<double> distinct;
    for (double v : fixture_mask_values()) distinct.insert(v);
    return static_cast<long>(distinct.size());
}

} // namespace

TEST_CASE("criterion 1: solver matches dense direct elimination") {
    auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(101);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        int w = 1 + static_cast<int>(rng() % 16);
        int h = 1 + static_cast<int>(rng() % 16);
        if (w == 1 && h == 1) h = 2;  // solve needs at least one unknown pixel
        ImageGrid img = fixtures::random_image(w, h, rng);
        Mask mask = fixtures::random_mask(w, h, 0.05 + 0.9 * (trial % 7) / 7.0, rng);
        ImageGrid u = solve({img, mask, 1e-12, 0});
        ImageGrid ref = oracles::dense_inpaint(img, mask);
        for (size_t i = 0; i < u.size(); ++i)
            worst = std::max(worst, std::abs(u.values[i] - ref.values[i]));
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool ok = worst <= 1e-6 && seconds < 30.0;
    report(1, "solver oracle equivalence, 200 instances", ok);
    CHECK(worst <= 1e-6);
    CHECK(seconds < 30.0);
}

TEST_CASE("criterion 2: 1-D reconstructions are interpolating linear splines") {
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> val(0.0, 255.0);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        int n = 64;
        ImageGrid img(n, 1, std::vector<double>(n, 0.0));
        for (auto& v : img.values) v = val(rng);
        Mask mask(n, 1);
        int nk = 2 + static_cast<int>(rng() % 6);
        std::set<int> knots;
        while (static_cast<int>(knots.size()) < nk)
            knots.insert(static_cast<int>(rng() % n));
        for (int x : knots) mask.set(x, 0, true);

        ImageGrid u = solve({img, mask, 1e-12, 0});

        // Oracle: linear between consecutive knots, constant extension past
        // the outermost ones (zero-slope Neumann ends).
        std::vector<int> kx(knots.begin(), knots.end());
        for (int x = 0; x < n; ++x) {
            double expect;
            if (x <= kx.front()) {
                expect = img.values[kx.front()];
            } else if (x >= kx.back()) {
                expect = img.values[kx.back()];
            } else {
                auto hi = std::upper_bound(kx.begin(), kx.end(), x);
                int b = *hi, a = *(hi - 1);
                double t = static_cast<double>(x - a) / (b - a);
                expect = (1.0 - t) * img.values[a] + t * img.values[b];
            }
            worst = std::max(worst, std::abs(u.values[x] - expect));
        }
    }
    bool ok = worst <= 1e-8;
    report(2, "1-D piecewise-linear spline property", ok);
    CHECK(worst <= 1e-8);
}

TEST_CASE("criterion 3: maximum principle holds on 1000 random instances") {
    std::mt19937_64 rng(303);
    long violations = 0;
    double tol = 1e-6 * 255.0;
    for (int trial = 0; trial < 1000; ++trial) {
        int w = 1 + static_cast<int>(rng() % 12);
        int h = 1 + static_cast<int>(rng() % 12);
        if (w == 1 && h == 1) h = 2;  // solve needs at least one unknown pixel
        ImageGrid img = fixtures::random_image(w, h, rng);
        Mask mask = fixtures::random_mask(w, h, 0.05 + 0.9 * (trial % 9) / 9.0, rng);
        double lo = 255.0, hi = 0.0;
        for (long pix : mask.known_indices()) {
            lo = std::min(lo, img.values[pix]);
            hi = std::max(hi, img.values[pix]);
        }
        ImageGrid u = solve({img, mask, 1e-10, 0});
        for (double v : u.values)
            if (v < lo - tol || v > hi + tol) ++violations;
    }
    bool ok = violations == 0;
    report(3, "maximum principle, 1000 instances", ok);
    CHECK(violations == 0);
}

TEST_CASE("criterion 4: tonal optimization never hurts and beats 25% on the fixture") {
    std::mt19937_64 rng(404);
    bool never_worse = true;
    for (int trial = 0; trial < 15; ++trial) {
        int n = 8 + static_cast<int>(rng() % 6);
        ImageGrid img = fixtures::random_image(n, n, rng);
        Mask mask = fixtures::random_mask(n, n, 0.15, rng);
        InfluenceBasis basis = influence_basis(mask, 1e-11);
        TonalResult r = optimize_tonal(img, mask, basis);
        double plain = mse(solve({img, mask, 1e-11, 0}), img);
        if (r.achieved_mse > plain + 1e-9) never_worse = false;
    }

    InfluenceBasis basis = influence_basis(fixture_mask(), 1e-10);
    TonalResult tonal = optimize_tonal(fixture_image(), fixture_mask(), basis);
    double plain = plain_fixture_mse();
    double improvement = (plain - tonal.achieved_mse) / plain;
    std::printf("[acceptance]   fixture mse plain=%.4f tonal=%.4f improvement=%.1f%%\n",
                plain, tonal.achieved_mse, 100.0 * improvement);

    bool ok = never_worse && improvement >= 0.25;
    report(4, "tonal optimization gains", ok);
    CHECK(never_worse);
    CHECK(improvement >= 0.25);
}

TEST_CASE("criterion 5: clustering objectives are monotone across 100 runs each") {
    bool kmeans_ok = true, ward_ok = true, gmm_ok = true;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        std::mt19937_64 rng(seed * 7919 + 13);
        std::uniform_real_distribution<double> u(0.0, 255.0);
        FeatureSet fs;
        fs.dim = 1;
        int n = 24 + static_cast<int>(rng() % 16);
        for (int i = 0; i < n; ++i) {
            fs.points.push_back(std::floor(u(rng)));
            fs.weights.push_back(1.0);
        }

        Clustering km = kmeans_pp(fs, 4, seed);
        for (size_t i = 1; i < km.objective_trace.size(); ++i)
            if (km.objective_trace[i] > km.objective_trace[i - 1] + 1e-9) kmeans_ok = false;

        Clustering wd = ward_linkage(fs, 1);
        for (size_t i = 1; i < wd.objective_trace.size(); ++i)
            if (wd.objective_trace[i] < wd.objective_trace[i - 1] - 1e-9) ward_ok = false;

        Clustering gm = gmm_em(fs, 3, seed);
        for (size_t i = 1; i < gm.objective_trace.size(); ++i)
            if (gm.objective_trace[i] <
                gm.objective_trace[i - 1] - 1e-9 * std::abs(gm.objective_trace[i - 1]) - 1e-9)
                gmm_ok = false;
    }
    bool ok = kmeans_ok && ward_ok && gmm_ok;
    report(5, "monotone clustering objectives", ok);
    CHECK(kmeans_ok);
    CHECK(ward_ok);
    CHECK(gmm_ok);
}

TEST_CASE("criterion 6: restarted k-means matches the exhaustive partition oracle") {
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> u(0.0, 255.0);
    int matches = 0, trials = 200;
    for (int trial = 0; trial < trials; ++trial) {
        int n = 4 + static_cast<int>(rng() % 5);  // 4..8
        int k = 2 + static_cast<int>(rng() % 2);  // 2..3
        FeatureSet fs;
        fs.dim = 1;
        for (int i = 0; i < n; ++i) {
            fs.points.push_back(u(rng));
            fs.weights.push_back(1.0);
        }
        double oracle = oracles::best_within_ss(fs.points, fs.weights, 1, k);
        double best = std::numeric_limits<double>::infinity();
        for (int r = 0; r < 20; ++r)
            best = std::min(best,
                            kmeans_pp(fs, k, static_cast<std::uint64_t>(trial) * 100 + r).within_ss);
        if (best <= oracle * (1.0 + 1e-9) + 1e-9) ++matches;
    }
    bool ok = matches >= static_cast<int>(0.95 * trials);
    std::printf("[acceptance]   oracle matches: %d/%d\n", matches, trials);
    report(6, "small-instance k-means exactness", ok);
    CHECK(matches >= static_cast<int>(0.95 * trials));
}

// The CH clause of this criterion is not attainable on 1-D data and is kept
// as an honestly failing assertion. Splitting any cluster that lies away from
// the global mean adds roughly its squared distance to CH's between-cluster
// sum, while k-means splits shrink the within sum by ~2.75x per fully split
// blob; the net CH value therefore keeps growing with k and the argmax
// saturates at the top of the searched range. This holds for any blob spread
// and also for the size-weighted variant of the between term (the minimum
// within-reduction over 1-D Gaussian mixtures, 2.752x, still exceeds the
// 2.64x that the (N-k)/(k-1) factors could absorb). An independent Python
// re-implementation reproduces 0/10 hits for both variants; the same
// saturation at the top of the range shows up on real grey-value sweeps.
TEST_CASE("criterion 7: validity indices recover three Gaussian blobs") {
    int ch_hits = 0, db_hits = 0, sil_hits = 0, gap_hits = 0;
    std::vector<int> ch_choices;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        std::mt19937_64 rng(seed * 131 + 7);
        std::normal_distribution<double> g(0.0, 1.5);
        FeatureSet fs;
        fs.dim = 1;
        double means[3] = {0.0, 50.0, 100.0};
        for (int i = 0; i < 60; ++i) {
            fs.points.push_back(means[i % 3] + g(rng));
            fs.weights.push_back(1.0);
        }
        GapConfig gap_cfg;
        gap_cfg.seed = seed + 900;
        IndexReport r = select_k(fs, ClusterAlgorithm::KMeans, 2, 6,
                                 {"ch", "db", "silhouette", "gap"}, seed, gap_cfg);
        if (r.chosen_k["ch"] == 3) ++ch_hits;
        if (r.chosen_k["db"] == 3) ++db_hits;
        if (r.chosen_k["silhouette"] == 3) ++sil_hits;
        if (r.chosen_k["gap"] == 3) ++gap_hits;
        ch_choices.push_back(r.chosen_k["ch"]);
    }
    std::printf("[acceptance]   hits of 10: ch=%d db=%d silhouette=%d gap=%d\n",
                ch_hits, db_hits, sil_hits, gap_hits);
    std::printf("[acceptance]   ch chose k =");
    for (int k : ch_choices) std::printf(" %d", k);
    std::printf(" (saturates at the range maximum on 1-D data; see comment)\n");
    bool ok = ch_hits == 10 && db_hits == 10 && sil_hits == 10 && gap_hits >= 8;
    report(7, "index sanity on separated blobs", ok);
    CHECK(ch_hits == 10);
    CHECK(db_hits == 10);
    CHECK(sil_hits == 10);
    CHECK(gap_hits >= 8);
}

TEST_CASE("criterion 8: error plateau and exact reproduction at full palette") {
    std::map<int, double> cache;
    for (int k = 12; k <= 72; k += 4) fixture_mse_at_k(k, cache);
    double m12 = cache.at(12), m40 = cache.at(40), m72 = cache.at(72);
    std::printf("[acceptance]   mse(12)=%.4f mse(40)=%.4f mse(72)=%.4f\n", m12, m40, m72);
    bool plateau = (m40 - m72) <= 0.1 * (m12 - m72) + 1e-12;

    // With one level per distinct mask colour the codec must be lossless
    // with respect to the stored data, so the error equals the plain one.
    std::vector<double> values = fixture_mask_values();
    std::set<double> distinct(values.begin(), values.end());
    QuantTable full;
    full.kind = QuantKind::Clustered;
    full.levels.assign(distinct.begin(), distinct.end());
    EncodedPayload p = encode(values, fixture_mask(), full);
    double m_full = mse(reconstruct(decode(p.bytes)), fixture_image());
    double m_plain = plain_fixture_mse();
    bool exact = std::abs(m_full - m_plain) <= 1e-9;
    std::printf("[acceptance]   unique colours=%zu mse(full)=%.6f mse(plain)=%.6f\n",
                distinct.size(), m_full, m_plain);

    bool ok = plateau && exact;
    report(8, "plateau + full-palette exactness", ok);
    CHECK(plateau);
    CHECK(exact);
}

TEST_CASE("criterion 9: heavy colour reduction stays within 10% error") {
    long unique = fixture_unique_colours();
    int limit = static_cast<int>(0.2 * unique);
    double target = 1.1 * plain_fixture_mse();
    std::map<int, double> cache;
    bool ok = false;
    int best_k = -1;
    for (int k = limit; k >= 2 && !ok; --k) {
        if (fixture_mse_at_k(k, cache) <= target) {
            ok = true;
            best_k = k;
        }
    }
    std::printf("[acceptance]   unique=%ld limit=%d achieved at k=%d (target mse %.4f)\n",
                unique, limit, best_k, target);
    report(9, "80%% colour reduction claim", ok);
    CHECK(ok);
}

TEST_CASE("criterion 10: clustered quantization costs at least as many bytes") {
    std::mt19937_64 rng(1010);
    std::vector<long> deltas;
    int wins = 0, comparisons = 0;
    for (int trial = 0; trial < 50; ++trial) {
        ImageGrid img = fixtures::smooth_random_image(48, 48, rng);
        Mask mask = fixtures::random_mask(48, 48, 0.08, rng);
        std::vector<double> values;
        for (long pix : mask.known_indices()) values.push_back(img.values[pix]);
        FeatureSet fs = extract_features(img, &mask, 4);
        for (int k : {16, 24, 32, 48}) {
            if (fs.distinct_points() < static_cast<size_t>(k)) continue;
            Clustering c = kmeans_pp(fs, k, static_cast<std::uint64_t>(trial) * 4 + k);
            long clustered =
                static_cast<long>(encode(values, mask, make_clustered(c)).total_bytes());
            long equidistant =
                static_cast<long>(encode(values, mask, make_equidistant(k)).total_bytes());
            ++comparisons;
            if (clustered >= equidistant) ++wins;
            deltas.push_back(clustered - equidistant);
        }
    }
    std::sort(deltas.begin(), deltas.end());
    long median = deltas[deltas.size() / 2];
    std::printf("[acceptance]   clustered >= equidistant in %d/%d, median byte delta %+ld\n",
                wins, comparisons, median);
    bool ok = wins >= static_cast<int>(0.7 * comparisons);
    report(10, "storage cost increase of clustered levels", ok);
    CHECK(ok);
}

TEST_CASE("criterion 11: codec round trip and entropy bound") {
    std::mt19937_64 rng(1111);
    bool roundtrip_ok = true;
    for (int trial = 0; trial < 1000 && roundtrip_ok; ++trial) {
        int w = 1 + static_cast<int>(rng() % 16);
        int h = 1 + static_cast<int>(rng() % 16);
        Mask mask = fixtures::random_mask(w, h, 0.05 + 0.9 * (trial % 11) / 11.0, rng);
        int k = 1 + static_cast<int>(rng() % 256);
        QuantTable t = make_equidistant(k);
        std::uniform_real_distribution<double> u(0.0, 255.0);
        std::vector<double> values(mask.count_known());
        for (auto& v : values) v = u(rng);
        EncodedPayload p = encode(values, mask, t);
        DecodedData d = decode(p.bytes);
        if (d.mask.known != mask.known || d.indices != quantize(values, t))
            roundtrip_ok = false;
    }

    bool entropy_ok = true;
    for (int k : {2, 8, 64}) {
        std::vector<double> probs(k);
        for (int j = 0; j < k; ++j) probs[j] = 1.0 / (1.0 + j);  // zipf-like skew
        std::discrete_distribution<int> dist(probs.begin(), probs.end());
        int n = 20000;
        std::vector<int> stream(n);
        std::vector<long> counts(k, 0);
        for (auto& s : stream) {
            s = dist(rng);
            ++counts[s];
        }
        double entropy_bits = 0.0;
        for (long cnt : counts)
            if (cnt > 0)
                entropy_bits += -cnt * std::log2(static_cast<double>(cnt) / n);
        RangeEncoder enc;
        AdaptiveModel model(k);
        for (int s : stream) model.encode(enc, s);
        double coded_bits = 8.0 * static_cast<double>(enc.finish().size());
        if (coded_bits > entropy_bits + 32.0 * k + 64.0) entropy_ok = false;
    }

    bool ok = roundtrip_ok && entropy_ok;
    report(11, "bit-exact round trip + entropy bound", ok);
    CHECK(roundtrip_ok);
    CHECK(entropy_ok);
}

TEST_CASE("criterion 12: seeded runs are byte-deterministic") {
    std::mt19937_64 rng(1212);
    SweepSpec spec;
    spec.image = fixtures::smooth_random_image(24, 24, rng);
    SparsifyConfig cfg;
    cfg.target_density = 0.15;
    cfg.seed = 5;
    spec.mask = sparsify_mask(spec.image, cfg);
    spec.ks = {6, 10, 14};
    spec.kinds = {"equidistant", "kmeans", "ward", "gmm"};
    spec.indices = {"ch", "db", "silhouette", "gap"};
    spec.tonal = TonalMode::Quantized;
    spec.seed = 9;
    std::string first = run_sweep(spec).to_csv();
    spec.jobs = 3;
    std::string second = run_sweep(spec).to_csv();

    FeatureSet fs = extract_features(spec.image, &spec.mask, 4);
    std::string idx1 = select_k(fs, ClusterAlgorithm::KMeans, 2, 6, {"all"}, 3).to_csv();
    std::string idx2 = select_k(fs, ClusterAlgorithm::KMeans, 2, 6, {"all"}, 3).to_csv();

    bool ok = first == second && idx1 == idx2;
    report(12, "byte-identical seeded CSV output", ok);
    CHECK(first == second);
    CHECK(idx1 == idx2);
}
