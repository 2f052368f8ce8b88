#include <chrono>
#include <cmath>
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

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

ImageFormat output_format(const RunConfig& cfg, const fs::path& path) {
    if (cfg.format) return *cfg.format;
    if (auto f = format_from_extension(path)) return *f;
    throw InvalidArgument("cannot infer output format of " + path.string() + "; pass --format");
}

fs::path default_report_path(const fs::path& output) {
    fs::path p = output;
    p.replace_extension(".report.txt");
    return p;
}

std::string extension_of(ImageFormat f) {
    switch (f) {
    case ImageFormat::pgm: return ".pgm";
    case ImageFormat::png: return ".png";
    case ImageFormat::rawf32: return ".raw";
    }
    return ".raw";
}

} // namespace

void RunConfig::validate() const {
    if (usePhantom == input.has_value()) {
        throw InvalidArgument("exactly one of --in or --phantom is required");
    }
    if (usePhantom) phantom.validate();
    Lattice{lattice};
    if (eta && !std::isfinite(*eta)) throw InvalidArgument("threshold must be finite");
    if (policy.kind == ThresholdPolicy::Kind::fraction && !(policy.alpha > 0.0 && policy.alpha < 1.0)) {
        throw InvalidArgument("threshold fraction must lie strictly inside (0, 1)");
    }
    estimator.validate();
    NlmConfig{prefilterCfg.t, prefilterCfg.f, 1.0}.validate();
    if (!(prefilterCfg.hFactor > 0.0)) throw InvalidArgument("prefilter h factor must be positive");
    if (save.bit_depth != 8 && save.bit_depth != 16) throw InvalidArgument("bit depth must be 8 or 16");
}

Image load_input(const RunConfig& cfg) {
    if (cfg.usePhantom) return make_phantom(cfg.phantom);
    const fs::path& path = *cfg.input;
    if (!fs::exists(path)) throw IoError("no such file: " + path.string());
    if (auto fmt = format_from_extension(path)) return load_image(path, *fmt);
    if (cfg.format) return load_image(path, *cfg.format);
    throw IoError("cannot infer image format of " + path.string());
}

PipelineResult execute_pipeline(const RunConfig& cfg, const Image& input) {
    cfg.validate();
    PipelineResult res;
    res.input = input;
    res.roi = cfg.roi ? *cfg.roi : (cfg.usePhantom ? phantom_roi(cfg.phantom) : Roi::full(input));
    if (!res.roi.fits(input.width(), input.height())) throw InvalidArgument("roi outside image bounds");

    Image working = input;
    if (cfg.prefilter) {
        const auto t0 = Clock::now();
        res.prefilter = prefilter_pipeline(input, res.roi, cfg.prefilterCfg);
        working = res.prefilter->image;
        res.prefilterMs = ms_since(t0);
    }

    const auto t_est = Clock::now();
    if (cfg.eta) {
        // Estimates are informational with a manual threshold; small or flat inputs are fine.
        try {
            res.noise = estimate_noise_variance(working, res.roi, cfg.estimator);
        } catch (const InvalidArgument&) {
        }
        try {
            res.contrast = estimate_croi(working, res.roi);
        } catch (const InvalidArgument&) {
        }
        res.eta = *cfg.eta;
    } else {
        res.noise = estimate_noise_variance(working, res.roi, cfg.estimator);
        res.contrast = estimate_croi(working, res.roi);
        res.eta = select_threshold(*res.noise, *res.contrast, cfg.policy);
        res.etaAuto = true;
    }
    res.estimateMs = ms_since(t_est);

    const auto t_filter = Clock::now();
    const FilterConfig fcfg{cfg.lattice, res.eta};
    res.directionCount = direction_count(Lattice{cfg.lattice});
    res.bwi = weight_image(working, fcfg);
    if (cfg.maskBorder) res.bwi = mask_border(std::move(res.bwi), Lattice{cfg.lattice}.reach());
    res.working = working;
    res.output = apply_weights(working, res.bwi);
    res.filterMs = ms_since(t_filter);

    if (cfg.usePhantom) {
        const PhantomRegions regions = phantom_regions(cfg.phantom);
        const Mask core = annulus_core(cfg.phantom, cfg.lattice);
        res.contrastIn = masked_mean(input, regions.inner) - masked_mean(input, core);
        res.contrastOut = masked_mean(res.output, regions.inner) - masked_mean(res.output, core);
    }
    return res;
}

std::string format_report(const RunConfig& cfg, const PipelineResult& res, std::string_view command) {
    std::ostringstream os;
    os << std::setprecision(10);
    os << "command=" << command << '\n';
    if (cfg.usePhantom) {
        os << "input=phantom\n";
        std::istringstream spec(to_string(cfg.phantom));
        for (std::string line; std::getline(spec, line);) os << "phantom." << line << '\n';
    } else {
        os << "input=" << cfg.input->string() << '\n';
    }
    os << "width=" << res.input.width() << "\nheight=" << res.input.height() << '\n';
    os << "roi=" << res.roi.x0 << ',' << res.roi.y0 << ',' << res.roi.w << ',' << res.roi.h << '\n';
    os << "lattice=" << cfg.lattice << "\nn_d=" << res.directionCount << '\n';
    os << "block_side=" << cfg.estimator.blockSide << "\nretain_fraction=" << cfg.estimator.retainFraction << '\n';
    os << "bracket_lower=" << (cfg.policy.lower == BracketLower::variance ? "variance" : "stddev") << '\n';
    os << "policy=" << (cfg.policy.kind == ThresholdPolicy::Kind::midpoint ? "midpoint" : "fraction") << '\n';
    if (cfg.policy.kind == ThresholdPolicy::Kind::fraction) os << "alpha=" << cfg.policy.alpha << '\n';
    if (res.noise) {
        os << "sigma2=" << res.noise->sigma2 << "\ngamma=" << res.noise->gamma
           << "\nblocks_used=" << res.noise->nBlocksUsed << '\n';
    } else {
        os << "sigma2=n/a\n";
    }
    if (res.contrast) {
        os << "c_roi=" << res.contrast->c_roi << "\nmu_hi=" << res.contrast->mu_hi << "\nmu_lo=" << res.contrast->mu_lo
           << '\n';
    } else {
        os << "c_roi=n/a\n";
    }
    os << "eta=" << res.eta << "\neta_source=" << (res.etaAuto ? "auto" : "manual") << '\n';
    if (!cfg.prefilter) {
        os << "prefilter=disabled\n";
    } else {
        const PrefilterResult& p = *res.prefilter;
        os << "prefilter=" << (p.prefiltered ? "prefiltered" : "passthrough") << "\nprefilter.sigma_M=" << p.sigmaM
           << "\nprefilter.trigger=" << p.trigger << "\nprefilter.t=" << cfg.prefilterCfg.t
           << "\nprefilter.f=" << cfg.prefilterCfg.f << "\nprefilter.h_factor=" << cfg.prefilterCfg.hFactor << '\n';
        if (p.prefiltered) os << "prefilter.h=" << p.h << '\n';
    }
    os << "mask_border=" << (cfg.maskBorder ? 1 : 0) << '\n';
    os << "mean_bwi=" << res.bwi.mean() << "\nmax_bwi=" << res.bwi.max() << '\n';
    if (res.contrastIn) os << "contrast_in=" << *res.contrastIn << "\ncontrast_out=" << *res.contrastOut << '\n';
    os << "scaling=" << (cfg.save.scaling == Scaling::minmax ? "minmax" : "clip01") << "\nbit_depth=" << cfg.save.bit_depth
       << '\n';
    os << "time_prefilter_ms=" << res.prefilterMs << "\ntime_estimate_ms=" << res.estimateMs
       << "\ntime_filter_ms=" << res.filterMs << '\n';
    return os.str();
}

void run_pipeline(const RunConfig& cfg, std::string_view command, std::ostream& out, std::ostream& log) {
    cfg.validate();
    const ImageFormat fmt = cfg.output ? output_format(cfg, *cfg.output) : cfg.format.value_or(ImageFormat::rawf32);

    log << "[" << command << "] loading input\n";
    const Image input = load_input(cfg);
    log << "[" << command << "] estimating and filtering (w=" << cfg.lattice << ")\n";
    const PipelineResult res = execute_pipeline(cfg, input);

    // Render everything in memory first so a failure leaves no partial outputs behind.
    std::vector<std::pair<Image, Direction>> kspaces;
    if (cfg.kspaceDir) {
        for (const Direction& d : enumerate_directions(Lattice{cfg.lattice})) {
            kspaces.emplace_back(direction_kspace(res.working, d, {cfg.lattice, res.eta}), d);
        }
    }
    const std::string report = format_report(cfg, res, command);

    if (cfg.output && !save_image(res.output, *cfg.output, fmt, cfg.save)) {
        log << "warning: output is constant; wrote all-zero samples\n";
    }
    if (cfg.bwiOutput) {
        save_image(res.bwi.to_image(), *cfg.bwiOutput, output_format(cfg, *cfg.bwiOutput), {Scaling::minmax, 8});
    }
    if (cfg.kspaceDir) {
        fs::create_directories(*cfg.kspaceDir);
        for (std::size_t i = 0; i < kspaces.size(); ++i) {
            const Direction& d = kspaces[i].second;
            std::ostringstream name;
            name << "kspace_" << std::setw(3) << std::setfill('0') << i << '_' << to_string(d.quadrant) << "_l" << d.l
                 << "_m" << d.m << extension_of(fmt);
            save_image(kspaces[i].first, *cfg.kspaceDir / name.str(), fmt, {Scaling::minmax, 8});
        }
    }
    // Without --out the report only goes to stdout (and --report when given).
    std::optional<fs::path> report_path = cfg.reportPath;
    if (!report_path && cfg.output) report_path = default_report_path(*cfg.output);
    if (report_path) {
        std::ofstream rep(*report_path);
        if (!rep) throw IoError("cannot write report " + report_path->string());
        rep << report;
    }
    out << report;
    if (cfg.output) log << "[" << command << "] wrote " << cfg.output->string() << '\n';
}

} // namespace xnbf::cli
