#pragma once

#include "pqc/imagegrid.hpp"

#include <cstdint>
#include <vector>

namespace pqc {

// Weighted feature vectors extracted from an image / mask pair.
//
// Variants:
//   1 position+value, all pixels      (dim 3)
//   2 position+value, mask pixels     (dim 3)
//   3 grey values, all pixels         (dim 1)
//   4 grey values, mask pixels        (dim 1)
//   5 histogram, all pixels           (dim 1, weight = frequency)
//   6 histogram, mask pixels          (dim 1, weight = frequency)
//   7 colour map, all pixels          (dim 1, distinct values, weight 1)
//   8 colour map, mask pixels         (dim 1, distinct values, weight 1)
struct FeatureSet {
    int dim = 1;
    int variant = 0;
    std::vector<double> points;   // size() * dim, row per point
    std::vector<double> weights;  // positive, one per point

    size_t size() const { return weights.size(); }
    const double* point(size_t i) const { return points.data() + i * dim; }

    size_t distinct_points() const;
};

FeatureSet extract_features(const ImageGrid& image, const Mask* mask, int variant);

struct Clustering {
    int k = 0;
    int dim = 1;
    std::vector<double> centroids;  // k * dim
    std::vector<int> labels;        // per feature point
    double within_ss = 0.0;         // total weighted within-cluster sum of squares

    // Per-iteration objective (Lloyd SSE, Ward merge costs, EM negative
    // log-likelihood); kept for diagnostics and monotonicity checks.
    std::vector<double> objective_trace;

    const double* centroid(int j) const { return centroids.data() + static_cast<size_t>(j) * dim; }
};

double weighted_within_ss(const FeatureSet& features, const std::vector<int>& labels,
                          const std::vector<double>& centroids, int k, int dim);

Clustering kmeans_pp(const FeatureSet& features, int k, std::uint64_t seed,
                     int max_iters = 300);

Clustering ward_linkage(const FeatureSet& features, int k);

Clustering gmm_em(const FeatureSet& features, int k, std::uint64_t seed,
                  int max_iters = 200, double variance_floor = 1e-6);

} // namespace pqc
