#include "xnbf/estimation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "xnbf/error.hpp"

namespace xnbf {

namespace {

struct BlockStats {
    double variance;
    double absGamma;
    int index;
};

// Shifted by the first sample so a constant block gives exactly zero.
double unbiased_variance(std::span<const double> x) {
    const double k = x.front();
    double s = 0.0;
    for (double v : x) s += v - k;
    const double mean = s / static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - k - mean) * (v - k - mean);
    return ss / static_cast<double>(x.size() - 1);
}

double median(std::vector<double> v) {
    const std::size_t n = v.size();
    std::nth_element(v.begin(), v.begin() + n / 2, v.end());
    const double hi = v[n / 2];
    if (n % 2 == 1) return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + n / 2);
    return 0.5 * (lo + hi);
}

} // namespace

Skewness skewness(std::span<const double> samples) {
    if (samples.size() < 3) throw InvalidArgument("skewness needs at least 3 samples");
    const double n = static_cast<double>(samples.size());
    const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
    double m2 = 0.0;
    double m3 = 0.0;
    for (double v : samples) {
        const double d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= n;
    m3 /= n;
    if (m2 == 0.0) return {0.0, true};
    return {m3 / std::pow(m2, 1.5), false};
}

void NoiseEstimatorConfig::validate() const {
    if (blockSide < 2) throw InvalidArgument("noise estimator block side must be >= 2");
    if (!(retainFraction > 0.0 && retainFraction <= 1.0)) {
        throw InvalidArgument("retained block fraction must be in (0, 1]");
    }
}

NoiseEstimate estimate_noise_variance(const Image& img, const Roi& roi, const NoiseEstimatorConfig& cfg) {
    cfg.validate();
    if (!roi.fits(img.width(), img.height())) throw InvalidArgument("roi outside image bounds");
    const int bs = cfg.blockSide;
    const int bx = roi.w / bs;
    const int by = roi.h / bs;
    if (bx * by < 16) {
        throw InvalidArgument("roi holds " + std::to_string(bx * by) + " blocks of side " +
                              std::to_string(bs) + "; at least 16 are required");
    }

    std::vector<std::vector<double>> blocks;
    blocks.reserve(static_cast<std::size_t>(bx) * by);
    std::vector<BlockStats> stats;
    stats.reserve(blocks.capacity());
    for (int j = 0; j < by; ++j) {
        for (int i = 0; i < bx; ++i) {
            std::vector<double> px;
            px.reserve(static_cast<std::size_t>(bs) * bs);
            for (int r = 0; r < bs; ++r) {
                for (int c = 0; c < bs; ++c) px.push_back(img(roi.y0 + j * bs + r, roi.x0 + i * bs + c));
            }
            const Skewness g = skewness(px);
            stats.push_back({unbiased_variance(px), std::abs(g.gamma), static_cast<int>(blocks.size())});
            blocks.push_back(std::move(px));
        }
    }

    std::sort(stats.begin(), stats.end(), [](const BlockStats& a, const BlockStats& b) {
        return a.absGamma != b.absGamma ? a.absGamma < b.absGamma : a.index < b.index;
    });
    const auto keep = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(cfg.retainFraction * static_cast<double>(stats.size()))));

    std::vector<double> variances;
    std::vector<double> pooled;
    variances.reserve(keep);
    pooled.reserve(keep * bs * bs);
    for (std::size_t k = 0; k < keep; ++k) {
        variances.push_back(stats[k].variance);
        const auto& px = blocks[stats[k].index];
        pooled.insert(pooled.end(), px.begin(), px.end());
    }

    NoiseEstimate est;
    est.sigma2 = median(std::move(variances));
    est.gamma = skewness(pooled).gamma;
    est.nBlocksUsed = static_cast<int>(keep);
    return est;
}

ContrastEstimate estimate_croi(const Image& img, const Roi& roi) {
    const std::vector<double> px = roi_samples(img, roi);
    const auto [lo_it, hi_it] = std::minmax_element(px.begin(), px.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (!(hi > lo)) throw InvalidArgument("roi is constant; no two-class split exists");

    constexpr int kBins = 256;
    const double width = (hi - lo) / kBins;
    auto bin_of = [&](double v) { return std::min(kBins - 1, static_cast<int>((v - lo) / width)); };

    std::array<double, kBins> count{};
    std::array<double, kBins> sum{};
    for (double v : px) {
        const int b = bin_of(v);
        count[b] += 1.0;
        sum[b] += v - lo;
    }
    const double total_n = static_cast<double>(px.size());
    const double total_s = std::accumulate(sum.begin(), sum.end(), 0.0);

    // Classes are bins [0, t] and [t+1, 255]; pick t maximising n0 n1 (mu0 - mu1)^2.
    int best_t = 0;
    double best = -1.0;
    double n0 = 0.0;
    double s0 = 0.0;
    for (int t = 0; t < kBins - 1; ++t) {
        n0 += count[t];
        s0 += sum[t];
        const double n1 = total_n - n0;
        if (n0 == 0.0 || n1 == 0.0) continue;
        const double d = s0 / n0 - (total_s - s0) / n1;
        const double between = n0 * n1 * d * d;
        if (between > best) {
            best = between;
            best_t = t;
        }
    }

    double lo_sum = 0.0, hi_sum = 0.0;
    std::size_t lo_n = 0, hi_n = 0;
    for (double v : px) {
        if (bin_of(v) <= best_t) {
            lo_sum += v;
            ++lo_n;
        } else {
            hi_sum += v;
            ++hi_n;
        }
    }
    ContrastEstimate est;
    est.mu_lo = lo_sum / static_cast<double>(lo_n);
    est.mu_hi = hi_sum / static_cast<double>(hi_n);
    est.c_roi = std::max(0.0, est.mu_hi - est.mu_lo);
    return est;
}

double bracket_lower(const NoiseEstimate& noise, BracketLower mode) {
    return mode == BracketLower::variance ? noise.sigma2 : std::sqrt(noise.sigma2);
}

double select_threshold(const NoiseEstimate& noise, const ContrastEstimate& contrast,
                        const ThresholdPolicy& policy) {
    const double lower = bracket_lower(noise, policy.lower);
    const double upper = contrast.c_roi;
    if (!(lower < upper)) {
        throw BracketError("noise level " + std::to_string(lower) + " is not below region contrast " +
                           std::to_string(upper) +
                           "; enable non-local means pre-filtering to lower the noise first");
    }
    if (policy.kind == ThresholdPolicy::Kind::midpoint) return 0.5 * (lower + upper);
    if (!(policy.alpha > 0.0 && policy.alpha < 1.0)) {
        throw InvalidArgument("threshold fraction must lie strictly inside (0, 1)");
    }
    return lower + policy.alpha * (upper - lower);
}

} // namespace xnbf
