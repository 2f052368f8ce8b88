#pragma once

#include <span>
#include <string>

#include "xnbf/estimation.hpp"
#include "xnbf/image.hpp"

namespace xnbf {

/// Sobel magnitude sqrt(gx^2 + gy^2) with replicated borders.
Image gradient_magnitude(const Image& img);

enum class Diffusivity {
    exponential, ///< exp(-(x/kappa)^2)
    rational,    ///< 1 / (1 + (x/kappa)^2)
};

struct DiffusionConfig {
    double kappa = 1.0;
    double lambda = 0.2;
    int iterations = 10;
    Diffusivity gfun = Diffusivity::exponential;

    void validate() const;
};

double diffusivity(double gradient, double kappa, Diffusivity g) noexcept;

/// Explicit 4-neighbour Perona-Malik scheme with Neumann boundaries.
Image anisotropic_diffuse(const Image& img, const DiffusionConfig& cfg);

struct NlmConfig {
    int t = 5;    ///< search half-window
    int f = 1;    ///< patch half-window
    double h = 0.1;

    void validate() const;
};

/// Pixelwise non-local means with uniform patch distance and the max-weight self rule.
Image nlm_filter(const Image& img, const NlmConfig& cfg);

namespace detail {
struct SearchOffset {
    int drow;
    int dcol;
};
/// One output pixel of nlm_filter, visiting the search window in the given order. The
/// centre offset (0, 0) must not be in `offsets`.
double nlm_pixel(const Image& img, int row, int col, const NlmConfig& cfg,
                 std::span<const SearchOffset> offsets);
} // namespace detail

struct PrefilterConfig {
    int t = 5;
    int f = 1;
    /// h = hFactor * sigma_M
    double hFactor = 10.0;
    /// Prefilter when sigma_M exceeds this fraction of the ROI mean.
    double triggerFraction = 0.05;
    NoiseEstimatorConfig estimator{};
};

struct PrefilterResult {
    Image image;
    bool prefiltered = false;
    double sigmaM = 0.0;
    double roiMean = 0.0;
    double trigger = 0.0;
    double h = 0.0;

    std::string report() const;
};

PrefilterResult prefilter_pipeline(const Image& img, const Roi& roi, const PrefilterConfig& cfg = {});

} // namespace xnbf
