#pragma once

#include <span>

#include "xnbf/image.hpp"

namespace xnbf {

struct Skewness {
    double gamma = 0.0;
    /// Set when the samples had zero variance; gamma is then reported as 0.
    bool degenerate = false;
};

/// Population skewness m3 / m2^(3/2). Needs at least 3 samples.
Skewness skewness(std::span<const double> samples);

struct NoiseEstimate {
    double sigma2 = 0.0;
    double gamma = 0.0;
    int nBlocksUsed = 0;
};

struct NoiseEstimatorConfig {
    int blockSide = 8;
    /// Fraction of blocks with the smallest |skewness| kept for the variance median.
    double retainFraction = 0.25;

    void validate() const;
};

/// Noise variance from local block statistics: tile the ROI into non-overlapping blocks, keep
/// the most symmetric (lowest |skewness|) fraction, report the median of their variances.
/// The ROI must hold at least 16 blocks.
NoiseEstimate estimate_noise_variance(const Image& img, const Roi& roi,
                                      const NoiseEstimatorConfig& cfg = {});

struct ContrastEstimate {
    double c_roi = 0.0;
    double mu_hi = 0.0;
    double mu_lo = 0.0;
};

/// Two-class split of the ROI histogram (256 bins, maximum between-class variance), reporting
/// the difference of the class means.
ContrastEstimate estimate_croi(const Image& img, const Roi& roi);

/// Which quantity is used as the lower end of the threshold bracket.
enum class BracketLower {
    variance, ///< sigma2 as is
    stddev,   ///< sqrt(sigma2)
};

struct ThresholdPolicy {
    enum class Kind { midpoint, fraction };
    Kind kind = Kind::midpoint;
    /// Position inside the bracket for Kind::fraction, strictly in (0, 1).
    double alpha = 0.5;
    BracketLower lower = BracketLower::variance;

    static ThresholdPolicy midpoint() { return {}; }
    static ThresholdPolicy fraction(double a) { return {Kind::fraction, a, BracketLower::variance}; }
};

double bracket_lower(const NoiseEstimate& noise, BracketLower mode);

/// Picks eta inside (lower, c_roi). Throws BracketError when the bracket is empty.
double select_threshold(const NoiseEstimate& noise, const ContrastEstimate& contrast,
                        const ThresholdPolicy& policy = {});

} // namespace xnbf
