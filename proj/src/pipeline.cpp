#include "pqc/pipeline.hpp"
#include "pqc/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <future>
#include <limits>
#include <sstream>

namespace pqc {

namespace {

bool log_enabled() {
    static bool enabled = std::getenv("PQC_LOG") != nullptr;
    return enabled;
}

void log_line(const std::string& msg) {
    if (log_enabled()) std::fprintf(stderr, "[pqc] %s\n", msg.c_str());
}

Clustering cluster_grey_values(const std::string& algo, const FeatureSet& features,
                               int k, std::uint64_t seed) {
    if (features.dim != 1)
        throw ConfigError("clustered quantization needs a grey-value feature (3..8)");
    if (algo == "kmeans") return kmeans_pp(features, k, seed);
    if (algo == "ward") return ward_linkage(features, k);
    if (algo == "gmm") return gmm_em(features, k, seed);
    throw ConfigError("unknown quantizer kind '" + algo + "'");
}

QuantTable build_table(const std::string& kind, int k, const ImageGrid& image,
                       const Mask& mask, int feature, std::uint64_t seed) {
    if (kind == "equidistant") return make_equidistant(k);
    FeatureSet features = extract_features(image, &mask, feature);
    return make_clustered(cluster_grey_values(kind, features, k, seed));
}

std::vector<double> mask_values_of(const ImageGrid& image, const Mask& mask) {
    std::vector<double> v;
    for (long pix : mask.known_indices()) v.push_back(image.values[pix]);
    return v;
}

std::vector<double> tonal_values(const ImageGrid& image, const Mask& mask,
                                 const InfluenceBasis& basis, const QuantTable& table,
                                 TonalMode mode) {
    switch (mode) {
        case TonalMode::None:
            return mask_values_of(image, mask);
        case TonalMode::Continuous:
            return optimize_tonal(image, mask, basis).grey_values;
        case TonalMode::Quantized:
            return optimize_tonal_quantized(image, mask, basis, table).grey_values;
    }
    throw ConfigError("unknown tonal mode");
}

} // namespace

ImageGrid reconstruct(const DecodedData& decoded, double tolerance) {
    ImageGrid data = ImageGrid::constant(decoded.mask.width, decoded.mask.height, 0.0);
    std::vector<long> idx = decoded.mask.known_indices();
    for (size_t i = 0; i < idx.size(); ++i) data.values[idx[i]] = decoded.values[i];
    InpaintProblem p{std::move(data), decoded.mask, tolerance, 0};
    return solve(p);
}

CompressResult run_compress(const CompressOptions& options) {
    CompressResult result;
    if (options.mask) {
        result.mask = *options.mask;
        if (result.mask.width != options.image.width ||
            result.mask.height != options.image.height)
            throw DimensionError("mask does not match image");
    } else {
        log_line("sparsifying mask at density " + std::to_string(options.density));
        SparsifyConfig cfg;
        cfg.target_density = options.density;
        cfg.seed = options.seed;
        result.mask = sparsify_mask(options.image, cfg);
    }

    QuantTable table = build_table(options.quant, options.k, options.image,
                                   result.mask, options.feature, options.seed);
    result.effective_k = table.k();

    std::vector<double> values;
    if (options.tonal == TonalMode::None) {
        values = mask_values_of(options.image, result.mask);
    } else {
        log_line("computing influence basis");
        InfluenceBasis basis = influence_basis(result.mask, options.solver_tolerance,
                                               0, options.basis_budget);
        values = tonal_values(options.image, result.mask, basis, table, options.tonal);
    }

    result.payload = encode(values, result.mask, table);
    result.ratio = compression_ratio(result.payload);

    DecodedData decoded = decode(result.payload.bytes);
    result.mse_value = mse(reconstruct(decoded, options.solver_tolerance), options.image);
    return result;
}

std::string SweepResult::to_csv() const {
    std::ostringstream out;
    out.precision(12);
    out << "kind,k,mse_plain,mse_tonal,ratio_plain,ratio_tonal,ch,db,silhouette,gap\n";
    auto cell = [&](const SweepRow& row, const std::string& name) -> std::string {
        auto it = row.index_values.find(name);
        if (it == row.index_values.end()) return "nan";
        std::ostringstream v;
        v.precision(12);
        v << it->second;
        return v.str();
    };
    for (const auto& row : rows) {
        out << row.kind << "," << row.k << "," << row.mse_plain << "," << row.mse_tonal
            << "," << row.ratio_plain << "," << row.ratio_tonal << "," << cell(row, "ch")
            << "," << cell(row, "db") << "," << cell(row, "silhouette") << ","
            << cell(row, "gap") << "\n";
    }
    return out.str();
}

SweepResult run_sweep(const SweepSpec& spec) {
    if (spec.ks.empty() || spec.kinds.empty())
        throw ConfigError("sweep needs at least one k and one quantizer kind");
    for (int k : spec.ks)
        if (k < 1 || k > 256)
            throw ConfigError("sweep k values must lie in [1,256]");

    std::optional<InfluenceBasis> basis;
    if (spec.tonal != TonalMode::None) {
        log_line("computing influence basis for sweep");
        basis = influence_basis(spec.mask, spec.solver_tolerance, 0, spec.basis_budget);
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> original = mask_values_of(spec.image, spec.mask);

    auto evaluate = [&](const std::string& kind, int k) {
        SweepRow row;
        row.kind = kind;
        row.k = k;

        std::optional<Clustering> clustering;
        QuantTable table;
        if (kind == "equidistant") {
            table = make_equidistant(k);
        } else {
            FeatureSet features = extract_features(spec.image, &spec.mask, spec.feature);
            clustering = cluster_grey_values(kind, features, k, spec.seed);
            table = make_clustered(*clustering);
        }

        EncodedPayload plain = encode(original, spec.mask, table);
        row.ratio_plain = compression_ratio(plain);
        row.mse_plain = mse(reconstruct(decode(plain.bytes), spec.solver_tolerance),
                            spec.image);

        if (spec.tonal != TonalMode::None) {
            std::vector<double> tuned =
                tonal_values(spec.image, spec.mask, *basis, table, spec.tonal);
            EncodedPayload opt = encode(tuned, spec.mask, table);
            row.ratio_tonal = compression_ratio(opt);
            row.mse_tonal = mse(reconstruct(decode(opt.bytes), spec.solver_tolerance),
                                spec.image);
        } else {
            row.ratio_tonal = nan;
            row.mse_tonal = nan;
        }

        if (clustering && !spec.indices.empty()) {
            FeatureSet features = extract_features(spec.image, &spec.mask, spec.feature);
            auto enabled = [&](const std::string& name) {
                return std::find(spec.indices.begin(), spec.indices.end(), name) !=
                           spec.indices.end() ||
                       std::find(spec.indices.begin(), spec.indices.end(), "all") !=
                           spec.indices.end();
            };
            if (k >= 2) {
                if (enabled("ch"))
                    row.index_values["ch"] = calinski_harabasz(features, *clustering);
                if (enabled("db"))
                    row.index_values["db"] = davies_bouldin(features, *clustering);
                if (enabled("silhouette"))
                    row.index_values["silhouette"] = silhouette_mean(features, *clustering);
            }
        }
        return row;
    };

    std::vector<std::pair<std::string, int>> tasks;
    for (const auto& kind : spec.kinds)
        for (int k : spec.ks)
            tasks.emplace_back(kind, k);

    SweepResult result;
    result.rows.resize(tasks.size());
    int jobs = std::max(1, spec.jobs);
    if (jobs == 1) {
        for (size_t t = 0; t < tasks.size(); ++t)
            result.rows[t] = evaluate(tasks[t].first, tasks[t].second);
    } else {
        std::atomic<size_t> next{0};
        auto worker = [&]() {
            for (;;) {
                size_t t = next.fetch_add(1);
                if (t >= tasks.size()) break;
                result.rows[t] = evaluate(tasks[t].first, tasks[t].second);
            }
        };
        std::vector<std::future<void>> pool;
        for (int j = 0; j < jobs; ++j)
            pool.push_back(std::async(std::launch::async, worker));
        for (auto& f : pool) f.get();
    }
    return result;
}

std::string render_svg_chart(const std::string& title,
                             const std::vector<double>& x,
                             const std::vector<std::pair<std::string, std::vector<double>>>& series) {
    const int width = 640, height = 420;
    const int ml = 60, mr = 150, mt = 40, mb = 45;
    const char* palette[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd",
                             "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (double v : x) { xmin = std::min(xmin, v); xmax = std::max(xmax, v); }
    for (const auto& [name, ys] : series)
        for (double v : ys)
            if (std::isfinite(v)) { ymin = std::min(ymin, v); ymax = std::max(ymax, v); }
    if (!std::isfinite(ymin)) { ymin = 0; ymax = 1; }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;

    auto px = [&](double v) { return ml + (v - xmin) / (xmax - xmin) * (width - ml - mr); };
    auto py = [&](double v) { return height - mb - (v - ymin) / (ymax - ymin) * (height - mt - mb); };

    std::ostringstream out;
    out.precision(8);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
        << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
        << height - mb << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        double xv = xmin + (xmax - xmin) * t / 4.0;
        double yv = ymin + (ymax - ymin) * t / 4.0;
        out << "<text x=\"" << px(xv) << "\" y=\"" << height - mb + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << xv << "</text>\n";
        out << "<text x=\"" << ml - 8 << "\" y=\"" << py(yv) + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << yv << "</text>\n";
    }
    int idx = 0;
    for (const auto& [name, ys] : series) {
        const char* colour = palette[idx % 8];
        std::ostringstream pts;
        for (size_t i = 0; i < x.size() && i < ys.size(); ++i) {
            if (!std::isfinite(ys[i])) continue;
            pts << px(x[i]) << "," << py(ys[i]) << " ";
        }
        out << "<polyline fill=\"none\" stroke=\"" << colour
            << "\" stroke-width=\"1.5\" points=\"" << pts.str() << "\"/>\n";
        out << "<text x=\"" << width - mr + 12 << "\" y=\"" << mt + 16 * idx + 10
            << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << colour << "\">"
            << name << "</text>\n";
        ++idx;
    }
    out << "</svg>\n";
    return out.str();
}

} // namespace pqc
