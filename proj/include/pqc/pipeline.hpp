#pragma once

#include "pqc/codec.hpp"
#include "pqc/datasel.hpp"
#include "pqc/diffusion.hpp"
#include "pqc/imagegrid.hpp"
#include "pqc/indices.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pqc {

enum class TonalMode { None, Continuous, Quantized };

// One compress run: mask selection, quantizer construction, optional tonal
// optimization, encoding, and verification of the decoded reconstruction.
struct CompressOptions {
    ImageGrid image;
    std::optional<Mask> mask;          // taken as-is when set
    double density = 0.05;             // sparsify target when no mask given
    std::string quant = "equidistant"; // equidistant | kmeans | ward | gmm
    int feature = 4;
    int k = 32;
    TonalMode tonal = TonalMode::None;
    std::uint64_t seed = 0;
    double solver_tolerance = 1e-10;
    long long basis_budget = 200000000LL;
};

struct CompressResult {
    EncodedPayload payload;
    Mask mask;
    double ratio = 0.0;
    double mse_value = 0.0;       // decoded-container reconstruction vs input
    int effective_k = 0;          // after clustered-level dedup
};

CompressResult run_compress(const CompressOptions& options);

// Reconstruction by inpainting from a decoded container.
ImageGrid reconstruct(const DecodedData& decoded, double tolerance = 1e-10);

struct SweepSpec {
    ImageGrid image;
    Mask mask;
    std::vector<int> ks;
    std::vector<std::string> kinds;    // subset of equidistant,kmeans,ward,gmm
    int feature = 4;
    TonalMode tonal = TonalMode::None;
    std::vector<std::string> indices;  // ch, db, silhouette, gap (empty = none)
    std::uint64_t seed = 0;
    int jobs = 1;
    double solver_tolerance = 1e-10;
    long long basis_budget = 200000000LL;
};

struct SweepRow {
    std::string kind;
    int k = 0;
    double mse_plain = 0.0;
    double mse_tonal = 0.0;     // NaN when tonal mode is None
    double ratio_plain = 0.0;
    double ratio_tonal = 0.0;   // NaN when tonal mode is None
    std::map<std::string, double> index_values;
};

struct SweepResult {
    std::vector<SweepRow> rows;  // ordered by kind (spec order), then k
    std::string to_csv() const;
};

SweepResult run_sweep(const SweepSpec& spec);

// Minimal line chart: one polyline per series, linear axes, legend from
// series names. Series share the x vector; NaN samples are skipped.
std::string render_svg_chart(const std::string& title,
                             const std::vector<double>& x,
                             const std::vector<std::pair<std::string, std::vector<double>>>& series);

} // namespace pqc
