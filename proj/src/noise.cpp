#include "xnbf/noise.hpp"

#include <cmath>
#include <random>

#include "xnbf/error.hpp"

namespace xnbf {

Image add_gaussian_noise(const Image& img, double sigma, RngSeed seed) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw InvalidArgument("noise sigma must be finite and non-negative");
    }
    if (sigma == 0.0) return img;

    std::mt19937_64 rng(seed.value);
    std::normal_distribution<double> gauss(0.0, sigma);
    Image out = img;
    for (double& v : out.pixels()) {
        v += gauss(rng);
    }
    return out;
}

RngSeed derive_seed(RngSeed base, std::uint64_t index) {
    std::uint64_t z = base.value + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return {z ^ (z >> 31)};
}

} // namespace xnbf
