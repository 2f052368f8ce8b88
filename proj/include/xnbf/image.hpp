#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace xnbf {

/// Row-major 2D grid of double intensities. Indexing is (row, col).
class Image {
public:
    Image() = default;
    Image(int width, int height, double fill = 0.0);
    /// Takes ownership of `pixels`; throws InvalidArgument on size mismatch or non-finite values.
    Image(int width, int height, std::vector<double> pixels);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return pixels_.size(); }
    bool empty() const noexcept { return pixels_.empty(); }

    double operator()(int row, int col) const noexcept {
        return pixels_[static_cast<std::size_t>(row) * width_ + col];
    }
    double& operator()(int row, int col) noexcept {
        return pixels_[static_cast<std::size_t>(row) * width_ + col];
    }

    bool contains(int row, int col) const noexcept {
        return row >= 0 && row < height_ && col >= 0 && col < width_;
    }

    std::span<const double> pixels() const noexcept { return pixels_; }
    std::span<double> pixels() noexcept { return pixels_; }

    double min() const;
    double max() const;
    double mean() const;

    bool operator==(const Image&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> pixels_;
};

/// Boolean pixel mask with the same layout as Image.
class Mask {
public:
    Mask() = default;
    Mask(int width, int height, bool fill = false);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    bool operator()(int row, int col) const noexcept {
        return cells_[static_cast<std::size_t>(row) * width_ + col] != 0;
    }
    void set(int row, int col, bool value) noexcept {
        cells_[static_cast<std::size_t>(row) * width_ + col] = value ? 1 : 0;
    }

    std::size_t count() const noexcept;
    std::span<const std::uint8_t> cells() const noexcept { return cells_; }

    bool operator==(const Mask&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> cells_;
};

/// Rectangular region: (x0, y0) is the top-left (col, row), w x h its extent.
struct Roi {
    int x0 = 0;
    int y0 = 0;
    int w = 0;
    int h = 0;

    static Roi full(const Image& img) { return {0, 0, img.width(), img.height()}; }
    bool fits(int width, int height) const noexcept {
        return w >= 1 && h >= 1 && x0 >= 0 && y0 >= 0 && x0 + w <= width && y0 + h <= height;
    }
    bool operator==(const Roi&) const = default;
};

enum class Axis { row, col };

Image extract_roi(const Image& img, const Roi& roi);

/// Pixels of `roi` as a flat sequence, row-major.
std::vector<double> roi_samples(const Image& img, const Roi& roi);

/// Intensities along row or column `index`, positions from..to inclusive.
std::vector<double> line_profile(const Image& img, Axis axis, int index, int from, int to);

/// Mean of the pixels selected by `mask`; throws InvalidArgument on an empty mask.
double masked_mean(const Image& img, const Mask& mask);

} // namespace xnbf
