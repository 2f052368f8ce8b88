#include "xnbf/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "xnbf/error.hpp"

namespace xnbf {

namespace {

int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

double at_replicated(const Image& img, int r, int c) {
    return img(clampi(r, 0, img.height() - 1), clampi(c, 0, img.width() - 1));
}

} // namespace

Image gradient_magnitude(const Image& img) {
    if (img.width() < 3 || img.height() < 3) throw InvalidArgument("gradient needs an image of at least 3x3");
    Image out(img.width(), img.height());
    for (int r = 0; r < img.height(); ++r) {
        for (int c = 0; c < img.width(); ++c) {
            auto p = [&](int dr, int dc) { return at_replicated(img, r + dr, c + dc); };
            const double gx = (p(-1, 1) + 2.0 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2.0 * p(0, -1) + p(1, -1));
            const double gy = (p(1, -1) + 2.0 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2.0 * p(-1, 0) + p(-1, 1));
            out(r, c) = std::sqrt(gx * gx + gy * gy);
        }
    }
    return out;
}

void DiffusionConfig::validate() const {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw InvalidArgument("kappa must be positive");
    if (!(lambda > 0.0 && lambda <= 0.25)) throw InvalidArgument("lambda must lie in (0, 0.25]");
    if (iterations < 1) throw InvalidArgument("iterations must be >= 1");
}

double diffusivity(double gradient, double kappa, Diffusivity g) noexcept {
    const double s = gradient / kappa;
    return g == Diffusivity::exponential ? std::exp(-s * s) : 1.0 / (1.0 + s * s);
}

Image anisotropic_diffuse(const Image& img, const DiffusionConfig& cfg) {
    cfg.validate();
    const int h = img.height();
    const int w = img.width();
    Image cur = img;
    Image next(w, h);
    for (int it = 0; it < cfg.iterations; ++it) {
        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c) {
                const double v = cur(r, c);
                // Neumann boundary: the mirrored neighbour equals v, so that flux is zero.
                const double n = r > 0 ? cur(r - 1, c) : v;
                const double s = r + 1 < h ? cur(r + 1, c) : v;
                const double e = c + 1 < w ? cur(r, c + 1) : v;
                const double west = c > 0 ? cur(r, c - 1) : v;
                double flux = 0.0;
                for (double q : {n, s, e, west}) {
                    const double d = q - v;
                    flux += diffusivity(std::abs(d), cfg.kappa, cfg.gfun) * d;
                }
                // The update is a convex combination of the stencil; the clamp only absorbs
                // round-off so the discrete maximum principle holds exactly.
                const double lo = std::min({v, n, s, e, west});
                const double hi = std::max({v, n, s, e, west});
                next(r, c) = std::clamp(v + cfg.lambda * flux, lo, hi);
            }
        }
        std::swap(cur, next);
    }
    return cur;
}

void NlmConfig::validate() const {
    if (t < 1) throw InvalidArgument("nlm search half-window t must be >= 1");
    if (f < 0) throw InvalidArgument("nlm patch half-window f must be >= 0");
    if (t < f) throw InvalidArgument("nlm requires t >= f");
    if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("nlm decay h must be positive");
}

namespace detail {

double nlm_pixel(const Image& img, int row, int col, const NlmConfig& cfg,
                 std::span<const SearchOffset> offsets) {
    const int f = cfg.f;
    const double patch_n = static_cast<double>((2 * f + 1) * (2 * f + 1));
    const double inv_h2 = 1.0 / (cfg.h * cfg.h);
    const double centre = img(row, col);

    double wsum = 0.0;
    double acc = 0.0;
    double wmax = 0.0;
    double lo = centre;
    double hi = centre;
    for (const SearchOffset& o : offsets) {
        const int qr = row + o.drow;
        const int qc = col + o.dcol;
        if (!img.contains(qr, qc)) continue;
        double dist = 0.0;
        for (int dr = -f; dr <= f; ++dr) {
            for (int dc = -f; dc <= f; ++dc) {
                const double d = at_replicated(img, row + dr, col + dc) - at_replicated(img, qr + dr, qc + dc);
                dist += d * d;
            }
        }
        const double wt = std::exp(-(dist / patch_n) * inv_h2);
        const double v = img(qr, qc);
        wmax = std::max(wmax, wt);
        wsum += wt;
        acc += wt * v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    // Self weight equals the largest weight among the other candidates.
    const double self = wmax > 0.0 ? wmax : 1.0;
    wsum += self;
    acc += self * centre;
    return std::clamp(acc / wsum, lo, hi);
}

} // namespace detail

Image nlm_filter(const Image& img, const NlmConfig& cfg) {
    cfg.validate();
    std::vector<detail::SearchOffset> offsets;
    for (int dr = -cfg.t; dr <= cfg.t; ++dr) {
        for (int dc = -cfg.t; dc <= cfg.t; ++dc) {
            if (dr != 0 || dc != 0) offsets.push_back({dr, dc});
        }
    }
    Image out(img.width(), img.height());
    for (int r = 0; r < img.height(); ++r) {
        for (int c = 0; c < img.width(); ++c) out(r, c) = detail::nlm_pixel(img, r, c, cfg, offsets);
    }
    return out;
}

std::string PrefilterResult::report() const {
    std::ostringstream os;
    os << (prefiltered ? "prefiltered" : "passthrough") << " sigma_M=" << sigmaM << " roi_mean=" << roiMean
       << " trigger=" << trigger;
    if (prefiltered) os << " h=" << h;
    return os.str();
}

PrefilterResult prefilter_pipeline(const Image& img, const Roi& roi, const PrefilterConfig& cfg) {
    const NoiseEstimate noise = estimate_noise_variance(img, roi, cfg.estimator);
    const std::vector<double> px = roi_samples(img, roi);
    double sum = 0.0;
    for (double v : px) sum += v;

    PrefilterResult res;
    res.sigmaM = std::sqrt(noise.sigma2);
    res.roiMean = sum / static_cast<double>(px.size());
    res.trigger = cfg.triggerFraction * res.roiMean;
    if (res.sigmaM > res.trigger) {
        res.h = cfg.hFactor * res.sigmaM;
        res.image = nlm_filter(img, {cfg.t, cfg.f, res.h});
        res.prefiltered = true;
    } else {
        res.image = img;
    }
    return res;
}

} // namespace xnbf
