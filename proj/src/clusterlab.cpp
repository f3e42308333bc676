#include "pqc/clusterlab.hpp"
#include "pqc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <set>

namespace pqc {

namespace {

double sq_dist(const double* a, const double* b, int dim) {
    double s = 0.0;
    for (int d = 0; d < dim; ++d) {
        double diff = a[d] - b[d];
        s += diff * diff;
    }
    return s;
}

} // namespace

size_t FeatureSet::distinct_points() const {
    std::set<std::vector<double>> seen;
    for (size_t i = 0; i < size(); ++i)
        seen.insert(std::vector<double>(point(i), point(i) + dim));
    return seen.size();
}

FeatureSet extract_features(const ImageGrid& image, const Mask* mask, int variant) {
    if (variant < 1 || variant > 8)
        throw ConfigError("feature variant must be in 1..8");
    bool mask_based = (variant % 2 == 0);
    if (mask_based && mask == nullptr)
        throw ConfigError("variant " + std::to_string(variant) + " requires a mask");
    if (mask && (mask->width != image.width || mask->height != image.height))
        throw DimensionError("mask does not match image");

    FeatureSet fs;
    fs.variant = variant;

    // x and y share the grey value range [0,255] (single-column/-row images
    // map to 0).
    double sx = image.width > 1 ? 255.0 / (image.width - 1) : 0.0;
    double sy = image.height > 1 ? 255.0 / (image.height - 1) : 0.0;

    auto selected = [&](int x, int y) {
        return !mask_based || mask->at(x, y);
    };

    if (variant <= 2) {
        fs.dim = 3;
        for (int y = 0; y < image.height; ++y)
            for (int x = 0; x < image.width; ++x)
                if (selected(x, y)) {
                    fs.points.push_back(x * sx);
                    fs.points.push_back(y * sy);
                    fs.points.push_back(image.at(x, y));
                    fs.weights.push_back(1.0);
                }
    } else if (variant <= 4) {
        fs.dim = 1;
        for (int y = 0; y < image.height; ++y)
            for (int x = 0; x < image.width; ++x)
                if (selected(x, y)) {
                    fs.points.push_back(image.at(x, y));
                    fs.weights.push_back(1.0);
                }
    } else {
        // Histogram / colour map: aggregate equal grey values; colour map
        // drops the frequency count.
        fs.dim = 1;
        std::map<double, double> freq;
        for (int y = 0; y < image.height; ++y)
            for (int x = 0; x < image.width; ++x)
                if (selected(x, y)) freq[image.at(x, y)] += 1.0;
        bool colour_map = variant >= 7;
        for (auto& [value, count] : freq) {
            fs.points.push_back(value);
            fs.weights.push_back(colour_map ? 1.0 : count);
        }
    }
    if (fs.weights.empty())
        throw ConfigError("feature extraction produced no samples");
    return fs;
}

double weighted_within_ss(const FeatureSet& features, const std::vector<int>& labels,
                          const std::vector<double>& centroids, int k, int dim) {
    double ss = 0.0;
    for (size_t i = 0; i < features.size(); ++i) {
        const double* c = centroids.data() + static_cast<size_t>(labels[i]) * dim;
        ss += features.weights[i] * sq_dist(features.point(i), c, dim);
    }
    (void)k;
    return ss;
}

namespace {

void recompute_centroids(const FeatureSet& fs, const std::vector<int>& labels, int k,
                         std::vector<double>& centroids) {
    int dim = fs.dim;
    centroids.assign(static_cast<size_t>(k) * dim, 0.0);
    std::vector<double> wsum(k, 0.0);
    for (size_t i = 0; i < fs.size(); ++i) {
        int j = labels[i];
        wsum[j] += fs.weights[i];
        for (int d = 0; d < dim; ++d)
            centroids[static_cast<size_t>(j) * dim + d] += fs.weights[i] * fs.point(i)[d];
    }
    for (int j = 0; j < k; ++j) {
        if (wsum[j] > 0)
            for (int d = 0; d < dim; ++d)
                centroids[static_cast<size_t>(j) * dim + d] /= wsum[j];
    }
}

// Returns indices of the k seeding points chosen by squared-distance
// sampling.
std::vector<size_t> kmeanspp_seed(const FeatureSet& fs, int k, std::mt19937_64& rng) {
    size_t n = fs.size();
    std::vector<size_t> seeds;
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());

    // first seed: weight-proportional
    {
        std::vector<double> w = fs.weights;
        std::discrete_distribution<size_t> pick(w.begin(), w.end());
        seeds.push_back(pick(rng));
    }
    while (static_cast<int>(seeds.size()) < k) {
        const double* last = fs.point(seeds.back());
        double total = 0.0;
        for (size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], sq_dist(fs.point(i), last, fs.dim));
            total += fs.weights[i] * d2[i];
        }
        if (total <= 0.0)
            throw InfeasibleKError("fewer distinct points than requested seeds");
        std::uniform_real_distribution<double> u(0.0, total);
        double target = u(rng);
        double acc = 0.0;
        size_t choice = n - 1;
        for (size_t i = 0; i < n; ++i) {
            acc += fs.weights[i] * d2[i];
            if (acc >= target) { choice = i; break; }
        }
        seeds.push_back(choice);
    }
    return seeds;
}

void fix_empty_clusters(const FeatureSet& fs, std::vector<int>& labels, int k,
                        std::vector<double>& centroids) {
    int dim = fs.dim;
    for (int j = 0; j < k; ++j) {
        bool empty = true;
        for (int l : labels)
            if (l == j) { empty = false; break; }
        if (!empty) continue;
        // move the farthest point out of a cluster that can spare one
        std::vector<int> sizes(k, 0);
        for (int l : labels) ++sizes[l];
        double best = -1.0;
        size_t best_i = 0;
        for (size_t i = 0; i < fs.size(); ++i) {
            if (sizes[labels[i]] < 2) continue;
            const double* c = centroids.data() + static_cast<size_t>(labels[i]) * dim;
            double d = sq_dist(fs.point(i), c, dim);
            if (d > best) { best = d; best_i = i; }
        }
        if (best < 0.0) continue;
        labels[best_i] = j;
        recompute_centroids(fs, labels, k, centroids);
    }
}

} // namespace

Clustering kmeans_pp(const FeatureSet& features, int k, std::uint64_t seed, int max_iters) {
    if (k < 1)
        throw InfeasibleKError("k must be positive");
    if (static_cast<size_t>(k) > features.distinct_points())
        throw InfeasibleKError("k exceeds number of distinct points");

    std::mt19937_64 rng(seed);
    std::vector<size_t> seeds = kmeanspp_seed(features, k, rng);

    Clustering c;
    c.k = k;
    c.dim = features.dim;
    c.centroids.resize(static_cast<size_t>(k) * features.dim);
    for (int j = 0; j < k; ++j)
        std::copy(features.point(seeds[j]), features.point(seeds[j]) + features.dim,
                  c.centroids.begin() + static_cast<size_t>(j) * features.dim);

    size_t n = features.size();
    c.labels.assign(n, 0);
    std::vector<int> prev_labels;
    for (int it = 0; it < max_iters; ++it) {
        // assignment
        for (size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            int best_j = 0;
            for (int j = 0; j < k; ++j) {
                double d = sq_dist(features.point(i), c.centroid(j), features.dim);
                if (d < best) { best = d; best_j = j; }
            }
            c.labels[i] = best_j;
        }
        recompute_centroids(features, c.labels, k, c.centroids);
        fix_empty_clusters(features, c.labels, k, c.centroids);
        c.objective_trace.push_back(
            weighted_within_ss(features, c.labels, c.centroids, k, features.dim));
        if (c.labels == prev_labels) break;
        prev_labels = c.labels;
    }
    c.within_ss = weighted_within_ss(features, c.labels, c.centroids, k, features.dim);
    return c;
}

Clustering ward_linkage(const FeatureSet& features, int k) {
    size_t n = features.size();
    if (k < 1 || static_cast<size_t>(k) > n)
        throw InfeasibleKError("ward: k must be in [1, N]");
    int dim = features.dim;

    // Active clusters tracked by representative index; Lance-Williams update
    // of the Ward merge cost.
    std::vector<double> weight(features.weights);
    std::vector<std::vector<double>> mean(n);
    std::vector<bool> alive(n, true);
    std::vector<int> cluster_of_point(n);
    for (size_t i = 0; i < n; ++i) {
        mean[i].assign(features.point(i), features.point(i) + dim);
        cluster_of_point[i] = static_cast<int>(i);
    }

    auto ward_cost = [&](size_t a, size_t b) {
        double d2 = sq_dist(mean[a].data(), mean[b].data(), dim);
        return weight[a] * weight[b] / (weight[a] + weight[b]) * d2;
    };

    struct Cand {
        double cost;
        size_t a, b;  // a < b
        bool operator>(const Cand& o) const {
            if (cost != o.cost) return cost > o.cost;
            if (a != o.a) return a > o.a;
            return b > o.b;
        }
    };
    std::priority_queue<Cand, std::vector<Cand>, std::greater<Cand>> heap;
    std::vector<std::uint32_t> version(n, 0);
    struct VCand { double cost; size_t a, b; std::uint32_t va, vb; };
    std::priority_queue<VCand, std::vector<VCand>,
                        decltype([](const VCand& l, const VCand& r) {
                            if (l.cost != r.cost) return l.cost > r.cost;
                            if (l.a != r.a) return l.a > r.a;
                            return l.b > r.b;
                        })> queue;

    for (size_t a = 0; a < n; ++a)
        for (size_t b = a + 1; b < n; ++b)
            queue.push({ward_cost(a, b), a, b, 0, 0});

    Clustering c;
    c.dim = dim;
    size_t active = n;
    while (active > static_cast<size_t>(k)) {
        VCand top = queue.top();
        queue.pop();
        if (!alive[top.a] || !alive[top.b] ||
            version[top.a] != top.va || version[top.b] != top.vb)
            continue;
        size_t a = top.a, b = top.b;
        c.objective_trace.push_back(top.cost);

        // merge b into a
        double wa = weight[a], wb = weight[b];
        for (int d = 0; d < dim; ++d)
            mean[a][d] = (wa * mean[a][d] + wb * mean[b][d]) / (wa + wb);
        weight[a] = wa + wb;
        alive[b] = false;
        for (size_t i = 0; i < n; ++i)
            if (cluster_of_point[i] == static_cast<int>(b))
                cluster_of_point[i] = static_cast<int>(a);
        ++version[a];
        --active;

        for (size_t o = 0; o < n; ++o) {
            if (!alive[o] || o == a) continue;
            size_t lo = std::min(o, a), hi = std::max(o, a);
            queue.push({ward_cost(lo, hi), lo, hi, version[lo], version[hi]});
        }
    }

    // relabel surviving clusters 0..k-1 in ascending representative order
    std::vector<int> relabel(n, -1);
    int next = 0;
    for (size_t i = 0; i < n; ++i)
        if (alive[i]) relabel[i] = next++;
    c.k = next;
    c.labels.resize(n);
    for (size_t i = 0; i < n; ++i)
        c.labels[i] = relabel[cluster_of_point[i]];
    recompute_centroids(features, c.labels, c.k, c.centroids);
    c.within_ss = weighted_within_ss(features, c.labels, c.centroids, c.k, dim);
    return c;
}

Clustering gmm_em(const FeatureSet& features, int k, std::uint64_t seed,
                  int max_iters, double variance_floor) {
    if (k < 1)
        throw InfeasibleKError("k must be positive");
    if (static_cast<size_t>(k) > features.distinct_points())
        throw InfeasibleKError("k exceeds number of distinct points");
    size_t n = features.size();
    int dim = features.dim;
    double wtotal = 0.0;
    for (double w : features.weights) wtotal += w;

    // init from a k-means++ run
    Clustering init = kmeans_pp(features, k, seed, 50);
    std::vector<double> means = init.centroids;
    std::vector<double> vars(static_cast<size_t>(k) * dim, 0.0);
    std::vector<double> mix(k, 0.0);
    {
        std::vector<double> wsum(k, 0.0);
        for (size_t i = 0; i < n; ++i) {
            int j = init.labels[i];
            wsum[j] += features.weights[i];
            for (int d = 0; d < dim; ++d) {
                double diff = features.point(i)[d] - means[static_cast<size_t>(j) * dim + d];
                vars[static_cast<size_t>(j) * dim + d] += features.weights[i] * diff * diff;
            }
        }
        for (int j = 0; j < k; ++j) {
            mix[j] = wsum[j] / wtotal;
            for (int d = 0; d < dim; ++d) {
                double& v = vars[static_cast<size_t>(j) * dim + d];
                v = std::max(wsum[j] > 0 ? v / wsum[j] : 0.0, variance_floor);
            }
        }
    }

    std::vector<double> resp(n * static_cast<size_t>(k));
    double prev_ll = -std::numeric_limits<double>::infinity();
    Clustering c;
    c.k = k;
    c.dim = dim;

    for (int it = 0; it < max_iters; ++it) {
        // E step: log responsibilities with diagonal Gaussians
        double ll = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double maxlog = -std::numeric_limits<double>::infinity();
            std::vector<double> logp(k);
            for (int j = 0; j < k; ++j) {
                double lp = std::log(std::max(mix[j], 1e-300));
                for (int d = 0; d < dim; ++d) {
                    double v = vars[static_cast<size_t>(j) * dim + d];
                    double diff = features.point(i)[d] - means[static_cast<size_t>(j) * dim + d];
                    lp += -0.5 * (std::log(2.0 * M_PI * v) + diff * diff / v);
                }
                logp[j] = lp;
                maxlog = std::max(maxlog, lp);
            }
            double denom = 0.0;
            for (int j = 0; j < k; ++j) denom += std::exp(logp[j] - maxlog);
            ll += features.weights[i] * (maxlog + std::log(denom));
            for (int j = 0; j < k; ++j)
                resp[i * k + j] = std::exp(logp[j] - maxlog) / denom;
        }
        c.objective_trace.push_back(ll);
        bool converged = (it > 0 && ll - prev_ll < 1e-9 * std::abs(prev_ll) + 1e-12);
        prev_ll = ll;

        // M step
        for (int j = 0; j < k; ++j) {
            double wj = 0.0;
            for (size_t i = 0; i < n; ++i) wj += features.weights[i] * resp[i * k + j];
            if (wj / wtotal < 1e-12)
                throw ComponentCollapseError("mixture weight vanished for component " +
                                             std::to_string(j));
            for (int d = 0; d < dim; ++d) {
                double m = 0.0;
                for (size_t i = 0; i < n; ++i)
                    m += features.weights[i] * resp[i * k + j] * features.point(i)[d];
                m /= wj;
                double v = 0.0;
                for (size_t i = 0; i < n; ++i) {
                    double diff = features.point(i)[d] - m;
                    v += features.weights[i] * resp[i * k + j] * diff * diff;
                }
                means[static_cast<size_t>(j) * dim + d] = m;
                vars[static_cast<size_t>(j) * dim + d] = std::max(v / wj, variance_floor);
            }
            mix[j] = wj / wtotal;
        }
        if (converged) break;
    }

    // hard labels by maximum posterior
    c.labels.resize(n);
    for (size_t i = 0; i < n; ++i) {
        int best = 0;
        for (int j = 1; j < k; ++j)
            if (resp[i * k + j] > resp[i * k + best]) best = j;
        c.labels[i] = best;
    }
    c.centroids = means;
    // keep the clustering invariant: no empty clusters after hard labeling
    fix_empty_clusters(features, c.labels, k, c.centroids);
    c.within_ss = weighted_within_ss(features, c.labels, c.centroids, k, dim);
    return c;
}

} // namespace pqc
