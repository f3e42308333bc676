#include "pqc/errors.hpp"
#include "pqc/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;

namespace {

pqc::TonalMode parse_tonal(const std::string& s) {
    if (s == "none") return pqc::TonalMode::None;
    if (s == "continuous") return pqc::TonalMode::Continuous;
    if (s == "quantized") return pqc::TonalMode::Quantized;
    throw pqc::ConfigError("unknown tonal mode '" + s + "'");
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw pqc::IoError("cannot open " + path + " for writing");
    out << content;
}

void write_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw pqc::IoError("cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw pqc::IoError("cannot open " + path);
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

struct CommonArgs {
    std::string image_path, mask_path, out_path;
    double density = 0.05;
    std::string quant = "equidistant";
    int feature = 4;
    int k = 32;
    std::string tonal = "none";
    std::uint64_t seed = 0;
    int jobs = 1;
};

int cmd_compress(const CommonArgs& args) {
    pqc::CompressOptions opt;
    opt.image = pqc::read_pgm(args.image_path);
    if (!args.mask_path.empty()) opt.mask = pqc::read_pbm(args.mask_path);
    opt.density = args.density;
    opt.quant = args.quant;
    opt.feature = args.feature;
    opt.k = args.k;
    opt.tonal = parse_tonal(args.tonal);
    opt.seed = args.seed;

    pqc::CompressResult result = pqc::run_compress(opt);
    std::string out = args.out_path.empty() ? args.image_path + ".pqc" : args.out_path;
    write_bytes(out, result.payload.bytes);
    std::printf("out=%s\n", out.c_str());
    std::printf("k=%d\n", result.effective_k);
    std::printf("bytes=%zu\n", result.payload.total_bytes());
    std::printf("ratio=%.6f\n", result.ratio);
    std::printf("mse=%.6f\n", result.mse_value);
    return 0;
}

int cmd_decompress(const std::string& in_path, const std::string& out_path, bool raw) {
    pqc::DecodedData decoded = pqc::decode(read_bytes(in_path));
    if (raw) {
        pqc::write_pbm(decoded.mask, out_path + ".pbm");
        std::ostringstream csv;
        csv << "index,value\n";
        for (size_t i = 0; i < decoded.values.size(); ++i)
            csv << decoded.indices[i] << "," << decoded.values[i] << "\n";
        write_file(out_path + ".csv", csv.str());
        std::printf("mask=%s.pbm\nvalues=%s.csv\n", out_path.c_str(), out_path.c_str());
        return 0;
    }
    pqc::ImageGrid u = pqc::reconstruct(decoded);
    pqc::write_pgm(u, out_path);
    std::printf("out=%s\n", out_path.c_str());
    return 0;
}

int cmd_sweep(const CommonArgs& args, int k_min, int k_max,
              const std::vector<std::string>& kinds,
              const std::vector<std::string>& indices, const std::string& out_dir) {
    pqc::SweepSpec spec;
    spec.image = pqc::read_pgm(args.image_path);
    if (!args.mask_path.empty()) {
        spec.mask = pqc::read_pbm(args.mask_path);
    } else {
        pqc::SparsifyConfig cfg;
        cfg.target_density = args.density;
        cfg.seed = args.seed;
        spec.mask = pqc::sparsify_mask(spec.image, cfg);
    }
    for (int k = k_min; k <= k_max; ++k) spec.ks.push_back(k);
    spec.kinds = kinds;
    spec.feature = args.feature;
    spec.tonal = parse_tonal(args.tonal);
    spec.indices = indices;
    spec.seed = args.seed;
    spec.jobs = args.jobs;

    pqc::SweepResult result = pqc::run_sweep(spec);
    fs::create_directories(out_dir);
    write_file(out_dir + "/sweep.csv", result.to_csv());

    // one chart per metric, one curve per kind
    std::vector<double> xs(spec.ks.begin(), spec.ks.end());
    auto curves = [&](auto getter) {
        std::vector<std::pair<std::string, std::vector<double>>> series;
        for (const auto& kind : spec.kinds) {
            std::vector<double> ys;
            for (const auto& row : result.rows)
                if (row.kind == kind) ys.push_back(getter(row));
            series.emplace_back(kind, std::move(ys));
        }
        return series;
    };
    write_file(out_dir + "/mse_plain.svg",
               pqc::render_svg_chart("reconstruction error (plain)", xs,
                                     curves([](const pqc::SweepRow& r) { return r.mse_plain; })));
    write_file(out_dir + "/ratio_plain.svg",
               pqc::render_svg_chart("compression ratio (plain)", xs,
                                     curves([](const pqc::SweepRow& r) { return r.ratio_plain; })));
    if (spec.tonal != pqc::TonalMode::None) {
        write_file(out_dir + "/mse_tonal.svg",
                   pqc::render_svg_chart("reconstruction error (tonal)", xs,
                                         curves([](const pqc::SweepRow& r) { return r.mse_tonal; })));
        write_file(out_dir + "/ratio_tonal.svg",
                   pqc::render_svg_chart("compression ratio (tonal)", xs,
                                         curves([](const pqc::SweepRow& r) { return r.ratio_tonal; })));
    }
    std::printf("csv=%s/sweep.csv\n", out_dir.c_str());
    return 0;
}

int cmd_select_k(const CommonArgs& args, int k_min, int k_max,
                 const std::vector<std::string>& indices, const std::string& out_path) {
    pqc::ImageGrid image = pqc::read_pgm(args.image_path);
    std::optional<pqc::Mask> mask;
    if (!args.mask_path.empty()) mask = pqc::read_pbm(args.mask_path);
    pqc::FeatureSet features =
        pqc::extract_features(image, mask ? &*mask : nullptr, args.feature);

    pqc::ClusterAlgorithm algo = pqc::ClusterAlgorithm::KMeans;
    if (args.quant == "ward") algo = pqc::ClusterAlgorithm::Ward;
    else if (args.quant == "gmm") algo = pqc::ClusterAlgorithm::Gmm;
    else if (args.quant != "kmeans" && args.quant != "equidistant")
        throw pqc::ConfigError("select-k supports kmeans, ward, gmm");

    pqc::IndexReport report =
        pqc::select_k(features, algo, k_min, k_max, indices, args.seed);
    if (!out_path.empty()) write_file(out_path, report.to_csv());
    for (const auto& [name, k] : report.chosen_k)
        std::printf("chosen_k_%s=%d\n", name.c_str(), k);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"PDE-based grey value image codec with clustering quantization"};
    app.require_subcommand(1);

    CommonArgs args;
    int k_min = 12, k_max = 72;
    std::vector<std::string> kinds = {"equidistant", "kmeans"};
    std::vector<std::string> indices;
    std::string out_dir = "sweep_out";
    std::string container_in, container_out = "decoded.pgm";
    bool raw = false;

    auto add_common = [&](CLI::App* cmd, bool needs_image) {
        if (needs_image)
            cmd->add_option("--image", args.image_path, "input PGM (P5)")->required();
        cmd->add_option("--mask", args.mask_path, "known-data mask, PBM (P4), 1 = known");
        cmd->add_option("--density", args.density, "sparsification target density");
        cmd->add_option("--feature", args.feature, "feature variant 1..8")
            ->check(CLI::Range(1, 8));
        cmd->add_option("--seed", args.seed, "RNG seed");
        cmd->add_option("--jobs", args.jobs, "parallel sweep workers");
    };

    auto* compress = app.add_subcommand("compress", "compress an image");
    add_common(compress, true);
    compress->add_option("--k", args.k, "number of quantization levels")
        ->check(CLI::Range(1, 256));
    compress->add_option("--quant", args.quant, "equidistant|kmeans|ward|gmm");
    compress->add_option("--tonal", args.tonal, "none|continuous|quantized");
    compress->add_option("--out", args.out_path, "output container path");

    auto* decompress = app.add_subcommand("decompress", "reconstruct from a container");
    decompress->add_option("--in", container_in, "input container")->required();
    decompress->add_option("--out", container_out, "output PGM path");
    decompress->add_flag("--raw", raw, "dump decoded mask (PBM) and values (CSV) instead");

    auto* sweep = app.add_subcommand("sweep", "quantizer sweep over k");
    add_common(sweep, true);
    sweep->add_option("--k-min", k_min);
    sweep->add_option("--k-max", k_max);
    sweep->add_option("--quant", kinds, "quantizer kinds to sweep");
    sweep->add_option("--tonal", args.tonal, "none|continuous|quantized");
    sweep->add_option("--index", indices, "indices to report: ch db silhouette all");
    sweep->add_option("--out", out_dir, "output directory");

    auto* selectk = app.add_subcommand("select-k", "cluster validity index sweep");
    add_common(selectk, true);
    selectk->add_option("--k-min", k_min);
    selectk->add_option("--k-max", k_max);
    selectk->add_option("--quant", args.quant, "kmeans|ward|gmm");
    selectk->add_option("--index", indices, "ch db gap silhouette all");
    selectk->add_option("--out", args.out_path, "CSV output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(compress)) return cmd_compress(args);
        if (app.got_subcommand(decompress))
            return cmd_decompress(container_in, container_out, raw);
        if (app.got_subcommand(sweep))
            return cmd_sweep(args, k_min, k_max, kinds, indices, out_dir);
        if (app.got_subcommand(selectk)) {
            if (indices.empty()) indices = {"all"};
            return cmd_select_k(args, k_min, k_max, indices, args.out_path);
        }
    } catch (const pqc::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const pqc::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
