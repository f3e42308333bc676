#pragma once

#include "pqc/clusterlab.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace pqc {

// Weighted variance ratio criterion; +infinity when the within-cluster
// scatter vanishes. Higher is better.
double calinski_harabasz(const FeatureSet& features, const Clustering& clustering);

// Lower is better. Throws on coincident centroids.
double davies_bouldin(const FeatureSet& features, const Clustering& clustering);

// Mean silhouette value, weights treated as point multiplicities. Values in
// [-1, 1]; higher is better.
double silhouette_mean(const FeatureSet& features, const Clustering& clustering);

struct GapConfig {
    int B = 10;  // number of reference datasets
    std::uint64_t seed = 0;
    // Overridable null model; the default draws uniformly from the
    // per-dimension bounding box of the data.
    std::function<FeatureSet(const FeatureSet&, std::uint64_t)> reference_sampler;
};

using ClusterFn = std::function<Clustering(const FeatureSet&, int k, std::uint64_t seed)>;

// Pairwise-distance within-cluster dispersion used by the gap statistic.
double gap_dispersion(const FeatureSet& features, const Clustering& clustering);

// gap(k) = mean_b log W_k(ref_b) - log W_k(data); clusterings must cover
// k_min..k_min+size-1 in order.
std::vector<double> gap_statistic(const FeatureSet& features,
                                  const std::vector<Clustering>& clusterings,
                                  int k_min, const ClusterFn& cluster_fn,
                                  const GapConfig& config);

enum class ClusterAlgorithm { KMeans, Ward, Gmm };

struct IndexReport {
    int k_min = 0;
    int k_max = 0;
    // per-index per-k values; index names: ch, db, gap, silhouette
    std::map<std::string, std::vector<double>> values;
    std::map<std::string, int> chosen_k;

    std::string to_csv() const;  // columns k, ch, db, gap, silhouette
};

IndexReport select_k(const FeatureSet& features, ClusterAlgorithm algorithm,
                     int k_min, int k_max, const std::vector<std::string>& indices,
                     std::uint64_t seed, const GapConfig& gap_config = {});

} // namespace pqc
