#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "xnbf/cli.hpp"
#include "xnbf/error.hpp"
#include "xnbf/metrics.hpp"
#include "xnbf/neighborhood.hpp"
#include "xnbf/noise.hpp"

namespace xnbf::cli {

namespace fs = std::filesystem;

namespace {

// Flags shared by most subcommands. Only one subcommand parses per run, so a single
// instance is bound into all of them.
struct Common {
    std::optional<std::string> in;
    bool phantom = false;
    std::optional<double> noise;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> specFile;
    std::optional<std::string> roi;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<std::string> scaling;
    int bits = 8;
    std::optional<std::string> report;
};

struct Threshold {
    std::optional<double> eta;
    bool etaAuto = false;
    std::optional<double> alpha;
    std::string bracket = "variance";
    int block = 8;
    double retain = 0.25;
};

const std::map<std::string, ImageFormat> kFormats{
    {"pgm", ImageFormat::pgm}, {"png", ImageFormat::png}, {"rawf32", ImageFormat::rawf32}};
const std::map<std::string, Scaling> kScalings{{"clip01", Scaling::clip01}, {"minmax", Scaling::minmax}};
const std::map<std::string, Diffusivity> kGfun{{"exp", Diffusivity::exponential}, {"rat", Diffusivity::rational}};

void add_input(CLI::App* sub, Common& c) {
    auto* in = sub->add_option("--in", c.in, "input image (pgm, png or rawf32)");
    auto* ph = sub->add_flag("--phantom", c.phantom, "synthesise the two-disc phantom as input");
    in->excludes(ph);
    sub->add_option("--noise", c.noise, "phantom noise in percent of the inner mean");
    sub->add_option("--seed", c.seed, "phantom noise seed");
    sub->add_option("--spec", c.specFile, "phantom key=value spec file");
    sub->add_option("--roi", c.roi, "x0,y0,w,h");
}

void add_output(CLI::App* sub, Common& c, bool required) {
    auto* o = sub->add_option("--out", c.out, "output path");
    if (required) o->required();
    sub->add_option("--format", c.format, "pgm, png or rawf32 (default: from extension)")
        ->check(CLI::IsMember({"pgm", "png", "rawf32"}));
    sub->add_option("--scaling", c.scaling, "clip01 or minmax for integer formats")
        ->check(CLI::IsMember({"clip01", "minmax"}));
    sub->add_option("--bits", c.bits, "8 or 16 bit samples for pgm/png")->check(CLI::IsMember({8, 16}));
}

void add_threshold(CLI::App* sub, Threshold& t) {
    auto* eta = sub->add_option("--eta", t.eta, "manual threshold");
    auto* autoflag = sub->add_flag("--eta-auto", t.etaAuto, "pick the threshold inside (sigma2, c_roi) (default)");
    eta->excludes(autoflag);
    sub->add_option("--alpha", t.alpha, "bracket position in (0,1) instead of the midpoint");
    sub->add_option("--bracket", t.bracket, "lower bracket end: variance or stddev")
        ->check(CLI::IsMember({"variance", "stddev"}))
        ->capture_default_str();
    sub->add_option("--block", t.block, "noise estimator block side")->capture_default_str();
    sub->add_option("--retain", t.retain, "fraction of most symmetric blocks kept")->capture_default_str();
}

PhantomSpec phantom_spec(const Common& c) {
    PhantomSpec spec = c.specFile ? load_phantom_spec(*c.specFile) : PhantomSpec{};
    if (c.noise) spec.noisePercent = *c.noise;
    if (c.seed) spec.seed = RngSeed{*c.seed};
    spec.validate();
    return spec;
}

RunConfig make_run_config(const Common& c, const Threshold& t, int lattice) {
    RunConfig cfg;
    if (c.in) cfg.input = *c.in;
    cfg.usePhantom = c.phantom;
    if (!c.in && !c.phantom) throw InvalidArgument("one of --in or --phantom is required");
    if (c.phantom) cfg.phantom = phantom_spec(c);
    if (c.roi) cfg.roi = parse_roi(*c.roi);
    cfg.lattice = lattice;
    cfg.eta = t.eta;
    if (t.alpha) cfg.policy = ThresholdPolicy::fraction(*t.alpha);
    cfg.policy.lower = t.bracket == "stddev" ? BracketLower::stddev : BracketLower::variance;
    cfg.estimator = {t.block, t.retain};
    cfg.prefilterCfg.estimator = cfg.estimator;
    if (c.out) cfg.output = *c.out;
    if (c.report) cfg.reportPath = *c.report;
    if (c.format) cfg.format = kFormats.at(*c.format);
    if (c.scaling) cfg.save.scaling = kScalings.at(*c.scaling);
    cfg.save.bit_depth = c.bits;
    return cfg;
}

Roi effective_roi(const RunConfig& cfg, const Image& img) {
    const Roi roi = cfg.roi ? *cfg.roi : (cfg.usePhantom ? phantom_roi(cfg.phantom) : Roi::full(img));
    if (!roi.fits(img.width(), img.height())) throw InvalidArgument("roi outside image bounds");
    return roi;
}

ImageFormat format_for(const Common& c, const fs::path& path) {
    if (c.format) return kFormats.at(*c.format);
    if (auto f = format_from_extension(path)) return *f;
    throw InvalidArgument("cannot infer output format of " + path.string() + "; pass --format");
}

void write_image(const Common& c, const Image& img, Scaling fallback, std::ostream& err) {
    const fs::path path = *c.out;
    const SaveOptions opts{c.scaling ? kScalings.at(*c.scaling) : fallback, c.bits};
    if (!save_image(img, path, format_for(c, path), opts)) err << "warning: output is constant\n";
}

void parse_argv(CLI::App& app, const std::vector<std::string>& args) {
    std::vector<std::string> storage;
    storage.reserve(args.size() + 1);
    storage.emplace_back("xnbf");
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : storage) argv.push_back(s.data());
    app.parse(static_cast<int>(argv.size()), argv.data());
}

std::vector<std::string> sweep_values(const std::string& text) {
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> out;
        for (double v : parse_range(text)) out.push_back(format_number(v));
        return out;
    }
    return split_list(text);
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Extended-neighbourhood binary weighted enhancement filter", "xnbf"};
    app.require_subcommand(1);

    Common c;
    Threshold t;
    int lattice = 11;

    // phantom
    auto* phantom = app.add_subcommand("phantom", "write the two-disc test phantom");
    phantom->add_option("--noise", c.noise, "noise in percent of the inner mean");
    phantom->add_option("--seed", c.seed, "noise seed");
    phantom->add_option("--spec", c.specFile, "key=value spec file");
    add_output(phantom, c, true);

    // estimate
    auto* estimate = app.add_subcommand("estimate", "print sigma2, gamma, c_roi and the midpoint threshold as CSV");
    add_input(estimate, c);
    estimate->add_option("--block", t.block, "block side")->capture_default_str();
    estimate->add_option("--retain", t.retain, "fraction of most symmetric blocks kept")->capture_default_str();
    estimate->add_option("--bracket", t.bracket, "lower bracket end: variance or stddev")
        ->check(CLI::IsMember({"variance", "stddev"}));
    estimate->add_option("--format", c.format, "input format when the extension is ambiguous")
        ->check(CLI::IsMember({"pgm", "png", "rawf32"}));

    // filter / pipeline
    std::optional<std::string> emitBwi, emitKspace;
    bool maskBorder = false;
    bool noPrefilter = false;
    PrefilterConfig pre;
    auto* filter = app.add_subcommand("filter", "binary weighted filter");
    auto* pipeline = app.add_subcommand("pipeline", "estimate, conditional NLM prefilter, filter, report");
    for (auto* sub : {filter, pipeline}) {
        add_input(sub, c);
        add_output(sub, c, false);
        add_threshold(sub, t);
        sub->add_option("--lattice", lattice, "odd lattice side w >= 3")->capture_default_str();
        sub->add_option("--emit-bwi", emitBwi, "write the weight image");
        sub->add_option("--emit-kspace", emitKspace, "directory for per-direction k-space images");
        sub->add_flag("--mask-border", maskBorder, "zero the weight image in the border band");
        sub->add_option("--report", c.report, "report path (default <out>.report.txt)");
    }
    pipeline->add_flag("--no-prefilter", noPrefilter, "never run the NLM prefilter");
    pipeline->add_option("--t", pre.t, "prefilter search half-window")->capture_default_str();
    pipeline->add_option("--f", pre.f, "prefilter patch half-window")->capture_default_str();
    pipeline->add_option("--h-factor", pre.hFactor, "prefilter h = factor * sigma_M")->capture_default_str();
    pipeline->add_option("--trigger", pre.triggerFraction, "prefilter when sigma_M > trigger * ROI mean")
        ->capture_default_str();

    // diffuse
    DiffusionConfig diff;
    std::string gname = "exp";
    auto* diffuse = app.add_subcommand("diffuse", "Perona-Malik anisotropic diffusion");
    add_input(diffuse, c);
    add_output(diffuse, c, true);
    diffuse->add_option("--kappa", diff.kappa, "edge threshold")->capture_default_str();
    diffuse->add_option("--lambda", diff.lambda, "step size, <= 0.25")->capture_default_str();
    diffuse->add_option("--iters", diff.iterations, "iterations")->capture_default_str();
    diffuse->add_option("--g", gname, "diffusivity: exp or rat")->check(CLI::IsMember({"exp", "rat"}));

    // nlm
    NlmConfig nlm;
    auto* nlmcmd = app.add_subcommand("nlm", "non-local means");
    nlmcmd->set_help_flag("--help", "print help");
    add_input(nlmcmd, c);
    add_output(nlmcmd, c, true);
    nlmcmd->add_option("--t", nlm.t, "search half-window")->capture_default_str();
    nlmcmd->add_option("--f", nlm.f, "patch half-window")->capture_default_str();
    nlmcmd->add_option("--h", nlm.h, "filtering parameter")->capture_default_str();

    // prefilter
    auto* prefilter = app.add_subcommand("prefilter", "NLM prefilter when the estimated noise is high");
    add_input(prefilter, c);
    add_output(prefilter, c, true);
    prefilter->add_option("--t", pre.t, "search half-window")->capture_default_str();
    prefilter->add_option("--f", pre.f, "patch half-window")->capture_default_str();
    prefilter->add_option("--h-factor", pre.hFactor, "h = factor * sigma_M")->capture_default_str();
    prefilter->add_option("--trigger", pre.triggerFraction, "prefilter when sigma_M > trigger * ROI mean")
        ->capture_default_str();
    prefilter->add_option("--block", t.block, "noise estimator block side")->capture_default_str();

    // sweep
    std::string sweepKind;
    std::string sweepValues;
    std::string prefix = "sweep";
    auto* sweep = app.add_subcommand("sweep", "parameter sweep: one image and CSV row per point");
    add_input(sweep, c);
    add_threshold(sweep, t);
    sweep->add_option("--kind", sweepKind, "lattice, eta, kappa or noise")
        ->required()
        ->check(CLI::IsMember({"lattice", "eta", "kappa", "noise"}));
    sweep->add_option("--values", sweepValues, "start:step:stop or a comma list (eta: 0.001, 0.5sigma2, mid, 2croi)")
        ->required();
    sweep->add_option("--prefix", prefix, "output prefix")->capture_default_str();
    sweep->add_option("--lattice", lattice, "lattice side for eta/noise/kappa sweeps")->capture_default_str();
    sweep->add_option("--format", c.format, "output format (default rawf32)")
        ->check(CLI::IsMember({"pgm", "png", "rawf32"}));
    sweep->add_option("--scaling", c.scaling, "clip01 or minmax")->check(CLI::IsMember({"clip01", "minmax"}));
    bool sweepPrefilter = false;
    sweep->add_flag("--prefilter", sweepPrefilter, "enable the conditional prefilter");
    sweep->add_flag("--mask-border", maskBorder, "zero the weight image in the border band");
    sweep->add_option("--lambda", diff.lambda, "kappa sweep: step size")->capture_default_str();
    sweep->add_option("--iters", diff.iterations, "kappa sweep: iterations")->capture_default_str();
    sweep->add_option("--g", gname, "kappa sweep: exp or rat")->check(CLI::IsMember({"exp", "rat"}));

    // cnr-sweep
    CnrSweepConfig cnrCfg;
    std::string sigmas = "0.005:0.005:0.05";
    bool independentRows = false;
    auto* cnrSweep = app.add_subcommand("cnr-sweep", "CNR against injected noise for the filter and diffusion");
    cnrSweep->add_option("--sigmas", sigmas, "start:step:stop or comma list")->capture_default_str();
    cnrSweep->add_option("--seed", c.seed, "noise seed");
    cnrSweep->add_option("--spec", c.specFile, "phantom spec file");
    cnrSweep->add_option("--lattice", cnrCfg.lattice, "lattice side")->capture_default_str();
    cnrSweep->add_option("--kappa-factor", cnrCfg.kappaFactor, "diffusion kappa = factor * sigma")
        ->capture_default_str();
    cnrSweep->add_option("--iters", cnrCfg.iterations, "diffusion iterations")->capture_default_str();
    cnrSweep->add_flag("--estimated-sigma", cnrCfg.estimatedSigma, "use the estimated sigma as CNR denominator");
    cnrSweep->add_flag("--independent-rows", independentRows, "fresh noise field per row");
    cnrSweep->add_option("--out", c.out, "CSV path (default stdout)");

    // directions
    std::optional<std::string> csvPath;
    auto* directions = app.add_subcommand("directions", "print the lattice mask and direction list");
    directions->add_option("--lattice", lattice, "odd lattice side w >= 3")->capture_default_str();
    directions->add_option("--csv", csvPath, "also write the list as CSV");

    // kspace
    std::string source = "weighted";
    auto* kspace = app.add_subcommand("kspace", "per-direction k-space magnitude images");
    add_input(kspace, c);
    add_threshold(kspace, t);
    kspace->add_option("--lattice", lattice, "odd lattice side w >= 3")->capture_default_str();
    kspace->add_option("--out-dir", emitKspace, "output directory")->required();
    kspace->add_option("--source", source, "weighted (sample * map) or binary (map only)")
        ->check(CLI::IsMember({"weighted", "binary"}))
        ->capture_default_str();
    kspace->add_option("--format", c.format, "output format (default pgm)")
        ->check(CLI::IsMember({"pgm", "png", "rawf32"}));

    try {
        parse_argv(app, args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return exit_invalid_config;
    }

    try {
        if (phantom->parsed()) {
            const PhantomSpec spec = phantom_spec(c);
            write_image(c, make_phantom(spec), Scaling::clip01, err);
            out << to_string(spec);
        } else if (estimate->parsed()) {
            RunConfig cfg = make_run_config(c, t, lattice);
            cfg.validate();
            const Image img = load_input(cfg);
            const Roi roi = effective_roi(cfg, img);
            const NoiseEstimate noise = estimate_noise_variance(img, roi, cfg.estimator);
            const ContrastEstimate contrast = estimate_croi(img, roi);
            out << "sigma2,gamma,c_roi,eta_mid\n";
            out << format_number(noise.sigma2) << ',' << format_number(noise.gamma) << ','
                << format_number(contrast.c_roi) << ',';
            // The midpoint is reported as empty when the bracket is inverted.
            try {
                out << format_number(select_threshold(noise, contrast, cfg.policy));
            } catch (const BracketError& e) {
                err << "warning: " << e.what() << '\n';
            }
            out << '\n';
        } else if (filter->parsed() || pipeline->parsed()) {
            RunConfig cfg = make_run_config(c, t, lattice);
            if (filter->parsed() && !cfg.output) throw InvalidArgument("--out is required");
            if (emitBwi) cfg.bwiOutput = *emitBwi;
            if (emitKspace) cfg.kspaceDir = *emitKspace;
            cfg.maskBorder = maskBorder;
            if (pipeline->parsed()) {
                cfg.prefilter = !noPrefilter;
                pre.estimator = cfg.estimator;
                cfg.prefilterCfg = pre;
            }
            run_pipeline(cfg, filter->parsed() ? "filter" : "pipeline", out, err);
        } else if (diffuse->parsed()) {
            RunConfig cfg = make_run_config(c, t, lattice);
            cfg.validate();
            diff.gfun = kGfun.at(gname);
            diff.validate();
            write_image(c, anisotropic_diffuse(load_input(cfg), diff), Scaling::clip01, err);
        } else if (nlmcmd->parsed()) {
            RunConfig cfg = make_run_config(c, t, lattice);
            cfg.validate();
            nlm.validate();
            write_image(c, nlm_filter(load_input(cfg), nlm), Scaling::clip01, err);
        } else if (prefilter->parsed()) {
            RunConfig cfg = make_run_config(c, t, lattice);
            cfg.validate();
            pre.estimator = cfg.estimator;
            const Image img = load_input(cfg);
            const PrefilterResult res = prefilter_pipeline(img, effective_roi(cfg, img), pre);
            write_image(c, res.image, Scaling::clip01, err);
            out << res.report() << '\n';
        } else if (sweep->parsed()) {
            SweepConfig scfg;
            scfg.kind = sweepKind == "lattice" ? SweepKind::lattice
                        : sweepKind == "eta"   ? SweepKind::eta
                        : sweepKind == "kappa" ? SweepKind::kappa
                                               : SweepKind::noise;
            scfg.values = sweep_values(sweepValues);
            scfg.prefix = prefix;
            scfg.base = make_run_config(c, t, lattice);
            scfg.base.maskBorder = maskBorder;
            scfg.base.prefilter = sweepPrefilter;
            scfg.base.prefilterCfg.estimator = scfg.base.estimator;
            diff.gfun = kGfun.at(gname);
            scfg.diffusion = diff;
            run_sweep(scfg, out, err);
        } else if (cnrSweep->parsed()) {
            cnrCfg.phantom = c.specFile ? load_phantom_spec(*c.specFile) : PhantomSpec{};
            cnrCfg.independentRows = independentRows;
            const RngSeed seed{c.seed.value_or(0)};
            const std::vector<double> values = sigmas.find(':') != std::string::npos ? parse_range(sigmas) : [&] {
                std::vector<double> v;
                for (const auto& tok : split_list(sigmas)) v.push_back(std::stod(tok));
                return v;
            }();
            const std::vector<CnrRow> rows = cnr_sweep(cnrCfg, values, seed);
            if (c.out) {
                std::ostringstream csv;
                write_cnr_csv(csv, rows);
                std::ofstream f(*c.out, std::ios::binary);
                if (!f) throw IoError("cannot write " + *c.out);
                f << csv.str();
                err << "[cnr-sweep] wrote " << rows.size() << " rows to " << *c.out << '\n';
            } else {
                write_cnr_csv(out, rows);
            }
        } else if (directions->parsed()) {
            const Lattice lat{lattice};
            const NeighborMask mask = neighborhood_mask(lat.reach());
            out << "lattice=" << lat.side() << " n_q=" << quadrant_count(mask) << " n_d=" << direction_count(lat)
                << "\nmask E(l,m), rows l=1..n, columns m=1..n:\n";
            for (int l = 1; l <= mask.n(); ++l) {
                for (int m = 1; m <= mask.n(); ++m) out << (m > 1 ? " " : "") << (mask(l, m) ? 1 : 0);
                out << '\n';
            }
            const std::vector<Direction> dirs = enumerate_directions(lat);
            out << "index quadrant l m drow dcol\n";
            std::ostringstream csv;
            csv << "index,quadrant,l,m,drow,dcol\n";
            for (std::size_t i = 0; i < dirs.size(); ++i) {
                const Direction& d = dirs[i];
                const Offset o = d.offset();
                out << i << ' ' << to_string(d.quadrant) << ' ' << d.l << ' ' << d.m << ' ' << o.drow << ' ' << o.dcol
                    << '\n';
                csv << i << ',' << to_string(d.quadrant) << ',' << d.l << ',' << d.m << ',' << o.drow << ',' << o.dcol
                    << '\n';
            }
            if (csvPath) {
                std::ofstream f(*csvPath, std::ios::binary);
                if (!f) throw IoError("cannot write " + *csvPath);
                f << csv.str();
            }
        } else if (kspace->parsed()) {
            RunConfig cfg = make_run_config(c, t, lattice);
            cfg.validate();
            const Image img = load_input(cfg);
            double eta = 0.0;
            if (cfg.eta) {
                eta = *cfg.eta;
            } else {
                const Roi roi = effective_roi(cfg, img);
                eta = select_threshold(estimate_noise_variance(img, roi, cfg.estimator), estimate_croi(img, roi),
                                       cfg.policy);
            }
            const FilterConfig fcfg{lattice, eta};
            fcfg.validate();
            const KspaceSource src = source == "binary" ? KspaceSource::binary_only : KspaceSource::weighted;
            const ImageFormat fmt = c.format ? kFormats.at(*c.format) : ImageFormat::pgm;
            const std::string ext = fmt == ImageFormat::pgm ? ".pgm" : fmt == ImageFormat::png ? ".png" : ".raw";
            const std::vector<Direction> dirs = enumerate_directions(Lattice{lattice});
            std::vector<Image> views;
            for (const Direction& d : dirs) views.push_back(direction_kspace(img, d, fcfg, src));
            const fs::path dir = *emitKspace;
            fs::create_directories(dir);
            for (std::size_t i = 0; i < dirs.size(); ++i) {
                std::ostringstream name;
                name << "kspace_" << std::setw(3) << std::setfill('0') << i << '_' << to_string(dirs[i].quadrant)
                     << "_l" << dirs[i].l << "_m" << dirs[i].m << ext;
                save_image(views[i], dir / name.str(), fmt, {Scaling::minmax, 8});
            }
            out << "eta=" << format_number(eta) << "\nimages=" << dirs.size() << '\n';
        }
    } catch (const BracketError& e) {
        err << "error: " << e.what()
            << "\nhint: the noise floor reaches the region contrast; enable the NLM prefilter (xnbf pipeline), "
               "pass an explicit --eta, or choose a ROI spanning both tissues\n";
        return exit_bracket_failure;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return exit_io_failure;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return exit_invalid_config;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return exit_io_failure;
    } catch (const std::invalid_argument& e) {
        err << "error: bad number (" << e.what() << ")\n";
        return exit_invalid_config;
    } catch (const std::out_of_range& e) {
        err << "error: number out of range (" << e.what() << ")\n";
        return exit_invalid_config;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_invalid_config;
    }
    return exit_ok;
}

} // namespace xnbf::cli
