#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "xnbf/cli.hpp"
#include "xnbf/error.hpp"
#include "xnbf/metrics.hpp"
#include "xnbf/neighborhood.hpp"

namespace xnbf::cli {

namespace fs = std::filesystem;

namespace {

// "2.5croi" -> (2.5, "croi"); "mid" -> (1, "mid"); "0.01" -> (0.01, "")
std::pair<double, std::string> split_token(const std::string& tok) {
    char* end = nullptr;
    const double k = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str()) return {1.0, tok};
    if (!std::isfinite(k)) throw InvalidArgument("bad sweep value '" + tok + "'");
    return {k, std::string(end)};
}

double require_number(const std::string& tok) {
    const auto [k, unit] = split_token(tok);
    if (!unit.empty()) throw InvalidArgument("sweep value '" + tok + "' must be a plain number");
    return k;
}

std::string extension_for(const RunConfig& cfg) {
    switch (cfg.format.value_or(ImageFormat::rawf32)) {
    case ImageFormat::pgm: return ".pgm";
    case ImageFormat::png: return ".png";
    case ImageFormat::rawf32: return ".raw";
    }
    return ".raw";
}

struct Row {
    std::string value;
    std::string output;
    std::string lattice, eta, sigma2, c_roi, mean_bwi, contrast_in, contrast_out;
};

std::string num(double v) { return format_number(v); }

} // namespace

std::string_view to_string(SweepKind kind) {
    switch (kind) {
    case SweepKind::lattice: return "lattice";
    case SweepKind::eta: return "eta";
    case SweepKind::kappa: return "kappa";
    case SweepKind::noise: return "noise";
    }
    return "?";
}

void run_sweep(const SweepConfig& cfg, std::ostream& out, std::ostream& log) {
    if (cfg.values.empty()) throw InvalidArgument("sweep range is empty");
    if (cfg.kind == SweepKind::noise && !cfg.base.usePhantom) {
        throw InvalidArgument("noise sweeps need --phantom input");
    }
    RunConfig base = cfg.base;
    base.output.reset();
    base.validate();
    if (cfg.kind == SweepKind::kappa) {
        DiffusionConfig probe = cfg.diffusion;
        probe.kappa = 1.0;
        probe.validate();
    }
    const std::string param(to_string(cfg.kind));
    const std::string ext = extension_for(base);
    const ImageFormat fmt = base.format.value_or(ImageFormat::rawf32);

    const Image input = load_input(base);
    const Roi roi = base.roi ? *base.roi : (base.usePhantom ? phantom_roi(base.phantom) : Roi::full(input));
    if (!roi.fits(input.width(), input.height())) throw InvalidArgument("roi outside image bounds");

    // Reference estimates for symbolic eta/kappa values.
    std::optional<NoiseEstimate> noise;
    std::optional<ContrastEstimate> contrast;
    if (cfg.kind == SweepKind::eta || cfg.kind == SweepKind::kappa) {
        Image working = input;
        if (base.prefilter) working = prefilter_pipeline(input, roi, base.prefilterCfg).image;
        noise = estimate_noise_variance(working, roi, base.estimator);
        contrast = estimate_croi(working, roi);
    }

    std::vector<Row> rows;
    std::vector<std::pair<fs::path, Image>> images;
    std::ostringstream report;
    report << std::setprecision(10) << "command=sweep\nkind=" << param << "\nprefix=" << cfg.prefix << '\n';
    if (noise) report << "reference.sigma2=" << noise->sigma2 << "\nreference.c_roi=" << contrast->c_roi << '\n';

    for (const std::string& tok : cfg.values) {
        Row row;
        row.value = tok;
        const fs::path path = cfg.prefix + "_" + param + "=" + tok + ext;
        row.output = path.string();
        log << "[sweep] " << param << '=' << tok << '\n';

        if (cfg.kind == SweepKind::kappa) {
            const auto [k, unit] = split_token(tok);
            DiffusionConfig d = cfg.diffusion;
            if (unit.empty()) {
                d.kappa = k;
            } else if (unit == "sigma") {
                d.kappa = k * std::sqrt(noise->sigma2);
            } else {
                throw InvalidArgument("kappa value '" + tok + "' must be a number or <k>sigma");
            }
            const Image diffused = anisotropic_diffuse(input, d);
            row.sigma2 = num(noise->sigma2);
            row.c_roi = num(contrast->c_roi);
            if (base.usePhantom) {
                const PhantomRegions regions = phantom_regions(base.phantom);
                const Mask core = annulus_core(base.phantom, base.lattice);
                row.contrast_in = num(masked_mean(input, regions.inner) - masked_mean(input, core));
                row.contrast_out = num(masked_mean(diffused, regions.inner) - masked_mean(diffused, core));
            }
            report << "[point " << param << '=' << tok << "]\nkappa=" << d.kappa << "\nlambda=" << d.lambda
                   << "\niterations=" << d.iterations
                   << "\ng=" << (d.gfun == Diffusivity::exponential ? "exp" : "rat") << '\n';
            images.emplace_back(path, diffused);
            rows.push_back(std::move(row));
            continue;
        }

        RunConfig point = base;
        Image point_input = input;
        switch (cfg.kind) {
        case SweepKind::lattice: {
            const double v = require_number(tok);
            if (v != std::floor(v)) throw InvalidArgument("lattice value '" + tok + "' is not an integer");
            point.lattice = static_cast<int>(v);
            break;
        }
        case SweepKind::eta: {
            const auto [k, unit] = split_token(tok);
            if (unit.empty()) {
                point.eta = k;
            } else if (unit == "sigma2") {
                point.eta = k * noise->sigma2;
            } else if (unit == "sigma") {
                point.eta = k * std::sqrt(noise->sigma2);
            } else if (unit == "croi") {
                point.eta = k * contrast->c_roi;
            } else if (unit == "mid" && k == 1.0) {
                point.eta = select_threshold(*noise, *contrast, base.policy);
            } else {
                throw InvalidArgument("eta value '" + tok + "' must be a number, <k>sigma2, <k>sigma, <k>croi or mid");
            }
            break;
        }
        case SweepKind::noise:
            point.phantom.noisePercent = require_number(tok);
            point.phantom.validate();
            point_input = make_phantom(point.phantom);
            break;
        case SweepKind::kappa: break;
        }

        const PipelineResult res = execute_pipeline(point, point_input);
        row.lattice = std::to_string(point.lattice);
        row.eta = num(res.eta);
        if (res.noise) row.sigma2 = num(res.noise->sigma2);
        if (res.contrast) row.c_roi = num(res.contrast->c_roi);
        row.mean_bwi = num(res.bwi.mean());
        if (res.contrastIn) {
            row.contrast_in = num(*res.contrastIn);
            row.contrast_out = num(*res.contrastOut);
        }
        report << "[point " << param << '=' << tok << "]\n" << format_report(point, res, "sweep");
        images.emplace_back(path, res.output);
        rows.push_back(std::move(row));
    }

    if (const fs::path dir = fs::path(cfg.prefix).parent_path(); !dir.empty()) fs::create_directories(dir);
    for (const auto& [path, img] : images) save_image(img, path, fmt, base.save);

    const fs::path csv_path = cfg.prefix + ".csv";
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw IoError("cannot write " + csv_path.string());
    csv << "param,value,output,lattice,eta,sigma2,c_roi,mean_bwi,contrast_in,contrast_out\n";
    for (const Row& r : rows) {
        csv << param << ',' << r.value << ',' << r.output << ',' << r.lattice << ',' << r.eta << ',' << r.sigma2 << ','
            << r.c_roi << ',' << r.mean_bwi << ',' << r.contrast_in << ',' << r.contrast_out << '\n';
    }
    std::ofstream rep(cfg.prefix + ".report.txt");
    if (!rep) throw IoError("cannot write sweep report");
    rep << report.str();
    out << "wrote " << rows.size() << " points to " << csv_path.string() << '\n';
}

} // namespace xnbf::cli
