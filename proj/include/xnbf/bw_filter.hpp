#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "xnbf/image.hpp"
#include "xnbf/neighborhood.hpp"

namespace xnbf {

struct FilterConfig {
    int lattice = 3;
    double eta = 0.0;

    void validate() const;
};

/// Per-direction 0/1 comparison result.
class BinaryMap {
public:
    BinaryMap(int width, int height);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::uint8_t operator()(int row, int col) const noexcept {
        return cells_[static_cast<std::size_t>(row) * width_ + col];
    }
    std::span<const std::uint8_t> cells() const noexcept { return cells_; }
    std::span<std::uint8_t> cells() noexcept { return cells_; }
    std::size_t count() const noexcept;

private:
    int width_;
    int height_;
    std::vector<std::uint8_t> cells_;
};

/// Pixelwise sum of binary maps (BWI).
class WeightImage {
public:
    WeightImage(int width, int height);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::uint32_t operator()(int row, int col) const noexcept {
        return cells_[static_cast<std::size_t>(row) * width_ + col];
    }
    std::uint32_t& operator()(int row, int col) noexcept {
        return cells_[static_cast<std::size_t>(row) * width_ + col];
    }
    std::span<const std::uint32_t> cells() const noexcept { return cells_; }

    void accumulate(const BinaryMap& map);
    double mean() const noexcept;
    std::uint32_t max() const noexcept;
    Image to_image() const;

    bool operator==(const WeightImage&) const = default;

private:
    int width_;
    int height_;
    std::vector<std::uint32_t> cells_;
};

/// B(i, j) = 1 iff img(i, j) - shifted(i, j) > eta (strict).
BinaryMap binary_map(const Image& img, const Direction& dir, double eta);

WeightImage weight_image(const Image& img, const FilterConfig& cfg);

/// Accumulates binary maps over an explicit direction list.
WeightImage weight_image(const Image& img, std::span<const Direction> directions, double eta);

/// O = I + I * BWI, no clipping.
Image apply_weights(const Image& img, const WeightImage& bwi);
Image apply_filter(const Image& img, const FilterConfig& cfg);

/// Zeroes a band of `width` pixels along every image border.
WeightImage mask_border(WeightImage bwi, int width);

enum class KspaceSource {
    weighted,    ///< sample * B_k
    binary_only, ///< B_k
};

/// log(1 + |DFT|) of one direction's filter component, DC moved to the centre.
Image direction_kspace(const Image& sample, const Direction& dir, const FilterConfig& cfg,
                       KspaceSource source = KspaceSource::weighted);

/// Same, for a component already formed by the caller.
Image kspace_magnitude(const Image& component);

} // namespace xnbf
