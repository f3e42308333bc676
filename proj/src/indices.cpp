#include "pqc/indices.hpp"
#include "pqc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace pqc {

namespace {

double dist(const double* a, const double* b, int dim) {
    double s = 0.0;
    for (int d = 0; d < dim; ++d) {
        double diff = a[d] - b[d];
        s += diff * diff;
    }
    return std::sqrt(s);
}

void check_basic(const FeatureSet& fs, const Clustering& c, int min_k) {
    if (c.labels.size() != fs.size())
        throw DimensionError("clustering does not match feature set");
    if (c.k < min_k)
        throw ConfigError("index requires k >= " + std::to_string(min_k));
}

} // namespace

double calinski_harabasz(const FeatureSet& fs, const Clustering& c) {
    check_basic(fs, c, 2);
    int dim = fs.dim;
    double wtotal = 0.0;
    std::vector<double> overall(dim, 0.0);
    for (size_t i = 0; i < fs.size(); ++i) {
        wtotal += fs.weights[i];
        for (int d = 0; d < dim; ++d) overall[d] += fs.weights[i] * fs.point(i)[d];
    }
    for (int d = 0; d < dim; ++d) overall[d] /= wtotal;
    if (wtotal <= c.k)
        throw ConfigError("CH requires N > k");

    double within = 0.0;
    for (size_t i = 0; i < fs.size(); ++i) {
        int j = c.labels[i];
        double d2 = 0.0;
        for (int d = 0; d < dim; ++d) {
            double diff = fs.point(i)[d] - c.centroid(j)[d];
            d2 += diff * diff;
        }
        within += fs.weights[i] * d2;
    }
    // between-cluster term is the plain sum over centroids, no cluster size
    // factor
    double between = 0.0;
    for (int j = 0; j < c.k; ++j) {
        double d2 = 0.0;
        for (int d = 0; d < dim; ++d) {
            double diff = c.centroid(j)[d] - overall[d];
            d2 += diff * diff;
        }
        between += d2;
    }
    double factor = (wtotal - c.k) / (c.k - 1);
    if (within == 0.0)
        return std::numeric_limits<double>::infinity();
    return between / within * factor;
}

double davies_bouldin(const FeatureSet& fs, const Clustering& c) {
    check_basic(fs, c, 2);
    int dim = fs.dim;
    std::vector<double> mean_dist(c.k, 0.0), cluster_w(c.k, 0.0);
    for (size_t i = 0; i < fs.size(); ++i) {
        int j = c.labels[i];
        cluster_w[j] += fs.weights[i];
        mean_dist[j] += fs.weights[i] * dist(fs.point(i), c.centroid(j), dim);
    }
    for (int j = 0; j < c.k; ++j) mean_dist[j] /= cluster_w[j];

    double sum = 0.0;
    for (int j = 0; j < c.k; ++j) {
        double worst = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < c.k; ++i) {
            if (i == j) continue;
            double dc = dist(c.centroid(i), c.centroid(j), dim);
            if (dc == 0.0)
                throw ConfigError("Davies-Bouldin undefined for coincident centroids");
            worst = std::max(worst, (mean_dist[j] + mean_dist[i]) / dc);
        }
        sum += worst;
    }
    return sum / c.k;
}

double silhouette_mean(const FeatureSet& fs, const Clustering& c) {
    check_basic(fs, c, 2);
    size_t n = fs.size();
    int dim = fs.dim;
    std::vector<double> cluster_w(c.k, 0.0);
    for (size_t i = 0; i < n; ++i) cluster_w[c.labels[i]] += fs.weights[i];

    double total_w = 0.0, total_s = 0.0;
    std::vector<double> sum_d(c.k);
    for (size_t i = 0; i < n; ++i) {
        std::fill(sum_d.begin(), sum_d.end(), 0.0);
        for (size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            sum_d[c.labels[j]] += fs.weights[j] * dist(fs.point(i), fs.point(j), dim);
        }
        int own = c.labels[i];
        // multiplicity w_i contributes w_i - 1 zero-distance co-members
        double own_w = cluster_w[own] - 1.0;
        double a = own_w > 0.0 ? sum_d[own] / own_w : 0.0;
        double b = std::numeric_limits<double>::infinity();
        for (int j = 0; j < c.k; ++j) {
            if (j == own || cluster_w[j] <= 0.0) continue;
            b = std::min(b, sum_d[j] / cluster_w[j]);
        }
        double s;
        if (a == 0.0) {
            s = 0.0;  // includes singleton clusters
        } else {
            s = (b - a) / std::max(a, b);
        }
        total_s += fs.weights[i] * s;
        total_w += fs.weights[i];
    }
    return total_s / total_w;
}

double gap_dispersion(const FeatureSet& fs, const Clustering& c) {
    size_t n = fs.size();
    int dim = fs.dim;
    std::vector<double> cluster_w(c.k, 0.0), pair_sum(c.k, 0.0);
    for (size_t i = 0; i < n; ++i) cluster_w[c.labels[i]] += fs.weights[i];
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            if (c.labels[i] != c.labels[j]) continue;
            pair_sum[c.labels[i]] +=
                2.0 * fs.weights[i] * fs.weights[j] * dist(fs.point(i), fs.point(j), dim);
        }
    double w = 0.0;
    for (int j = 0; j < c.k; ++j)
        if (cluster_w[j] > 0.0) w += pair_sum[j] / (2.0 * cluster_w[j]);
    return w;
}

namespace {

FeatureSet uniform_box_sample(const FeatureSet& fs, std::uint64_t seed) {
    int dim = fs.dim;
    std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
    std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
    for (size_t i = 0; i < fs.size(); ++i)
        for (int d = 0; d < dim; ++d) {
            lo[d] = std::min(lo[d], fs.point(i)[d]);
            hi[d] = std::max(hi[d], fs.point(i)[d]);
        }
    double total_w = 0.0;
    for (double w : fs.weights) total_w += w;
    long n = std::lround(total_w);

    std::mt19937_64 rng(seed);
    FeatureSet ref;
    ref.dim = dim;
    ref.variant = fs.variant;
    for (long i = 0; i < n; ++i) {
        for (int d = 0; d < dim; ++d) {
            std::uniform_real_distribution<double> u(lo[d], hi[d]);
            ref.points.push_back(lo[d] == hi[d] ? lo[d] : u(rng));
        }
        ref.weights.push_back(1.0);
    }
    return ref;
}

} // namespace

std::vector<double> gap_statistic(const FeatureSet& features,
                                  const std::vector<Clustering>& clusterings,
                                  int k_min, const ClusterFn& cluster_fn,
                                  const GapConfig& config) {
    if (config.B < 1)
        throw ConfigError("gap statistic needs B >= 1");
    auto sample = config.reference_sampler;
    if (!sample) sample = uniform_box_sample;

    const double floor = 1e-12;
    int n_k = static_cast<int>(clusterings.size());

    // reference datasets are shared across k
    std::vector<FeatureSet> refs;
    refs.reserve(config.B);
    for (int b = 0; b < config.B; ++b)
        refs.push_back(sample(features, config.seed + 1000003ULL * b));

    std::vector<double> gaps(n_k);
    for (int t = 0; t < n_k; ++t) {
        int k = k_min + t;
        double log_w_data = std::log(std::max(gap_dispersion(features, clusterings[t]), floor));
        double mean_ref = 0.0;
        for (int b = 0; b < config.B; ++b) {
            Clustering rc = cluster_fn(refs[b], k, config.seed + 7ULL * b);
            mean_ref += std::log(std::max(gap_dispersion(refs[b], rc), floor));
        }
        gaps[t] = mean_ref / config.B - log_w_data;
    }
    return gaps;
}

std::string IndexReport::to_csv() const {
    std::ostringstream out;
    out << "k,ch,db,gap,silhouette\n";
    int n = k_max - k_min + 1;
    auto cell = [&](const std::string& name, int t) -> std::string {
        auto it = values.find(name);
        if (it == values.end() || t >= static_cast<int>(it->second.size()))
            return "nan";
        std::ostringstream v;
        v.precision(12);
        v << it->second[t];
        return v.str();
    };
    for (int t = 0; t < n; ++t) {
        out << (k_min + t) << "," << cell("ch", t) << "," << cell("db", t) << ","
            << cell("gap", t) << "," << cell("silhouette", t) << "\n";
    }
    return out.str();
}

IndexReport select_k(const FeatureSet& features, ClusterAlgorithm algorithm,
                     int k_min, int k_max, const std::vector<std::string>& indices,
                     std::uint64_t seed, const GapConfig& gap_config) {
    if (k_min < 2 || k_max < k_min)
        throw ConfigError("select_k needs 2 <= k_min <= k_max");
    if (static_cast<size_t>(k_max) > features.distinct_points())
        throw InfeasibleKError("k_max exceeds number of distinct points");

    ClusterFn cluster_fn = [algorithm](const FeatureSet& fs, int k, std::uint64_t s) {
        switch (algorithm) {
            case ClusterAlgorithm::KMeans: return kmeans_pp(fs, k, s);
            case ClusterAlgorithm::Ward: return ward_linkage(fs, k);
            case ClusterAlgorithm::Gmm: return gmm_em(fs, k, s);
        }
        throw ConfigError("unknown clustering algorithm");
    };

    std::vector<Clustering> clusterings;
    for (int k = k_min; k <= k_max; ++k)
        clusterings.push_back(cluster_fn(features, k, seed));

    auto enabled = [&](const std::string& name) {
        return std::find(indices.begin(), indices.end(), name) != indices.end() ||
               std::find(indices.begin(), indices.end(), "all") != indices.end();
    };

    IndexReport report;
    report.k_min = k_min;
    report.k_max = k_max;

    auto pick = [&](const std::vector<double>& vals, bool maximize) {
        int best = 0;
        for (int t = 1; t < static_cast<int>(vals.size()); ++t) {
            bool better = maximize ? vals[t] > vals[best] : vals[t] < vals[best];
            if (better) best = t;  // ties keep the smaller k
        }
        return k_min + best;
    };

    if (enabled("ch")) {
        std::vector<double> v;
        for (auto& c : clusterings) v.push_back(calinski_harabasz(features, c));
        report.chosen_k["ch"] = pick(v, true);
        report.values["ch"] = std::move(v);
    }
    if (enabled("db")) {
        std::vector<double> v;
        for (auto& c : clusterings) v.push_back(davies_bouldin(features, c));
        report.chosen_k["db"] = pick(v, false);
        report.values["db"] = std::move(v);
    }
    if (enabled("silhouette")) {
        std::vector<double> v;
        for (auto& c : clusterings) v.push_back(silhouette_mean(features, c));
        report.chosen_k["silhouette"] = pick(v, true);
        report.values["silhouette"] = std::move(v);
    }
    if (enabled("gap")) {
        GapConfig gc = gap_config;
        if (gc.seed == 0) gc.seed = seed + 1;
        std::vector<double> v = gap_statistic(features, clusterings, k_min, cluster_fn, gc);
        report.chosen_k["gap"] = pick(v, true);
        report.values["gap"] = std::move(v);
    }
    return report;
}

} // namespace pqc
