#pragma once

#include <cstdint>

#include "xnbf/image.hpp"

namespace xnbf {

struct RngSeed {
    std::uint64_t value = 0;
};

/// Reference mean intensity used to convert "p% noise" into an absolute sigma.
inline constexpr double kReferenceMean = 0.655;

/// sigma = (percent / 100) * reference
constexpr double noise_sigma_for_percent(double percent, double reference = kReferenceMean) {
    return percent / 100.0 * reference;
}

/// Adds i.i.d. N(0, sigma^2) noise. Same seed and parameters give bit-identical output.
Image add_gaussian_noise(const Image& img, double sigma, RngSeed seed);

/// Derives an independent seed for sub-task `index` from a base seed (splitmix64).
RngSeed derive_seed(RngSeed base, std::uint64_t index);

} // namespace xnbf
