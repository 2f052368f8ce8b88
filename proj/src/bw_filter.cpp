#include "xnbf/bw_filter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "xnbf/error.hpp"
#include "xnbf/shift.hpp"

namespace xnbf {

void FilterConfig::validate() const {
    Lattice{lattice};
    if (!std::isfinite(eta)) throw InvalidArgument("threshold must be finite");
}

BinaryMap::BinaryMap(int width, int height)
    : width_(width), height_(height), cells_(static_cast<std::size_t>(width) * height, 0) {}

std::size_t BinaryMap::count() const noexcept {
    return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

WeightImage::WeightImage(int width, int height)
    : width_(width), height_(height), cells_(static_cast<std::size_t>(width) * height, 0) {}

void WeightImage::accumulate(const BinaryMap& map) {
    if (map.width() != width_ || map.height() != height_) {
        throw InvalidArgument("binary map dimensions differ from weight image");
    }
    const auto src = map.cells();
    for (std::size_t i = 0; i < cells_.size(); ++i) cells_[i] += src[i];
}

double WeightImage::mean() const noexcept {
    if (cells_.empty()) return 0.0;
    const double sum = std::accumulate(cells_.begin(), cells_.end(), 0.0);
    return sum / static_cast<double>(cells_.size());
}

std::uint32_t WeightImage::max() const noexcept {
    return cells_.empty() ? 0 : *std::max_element(cells_.begin(), cells_.end());
}

Image WeightImage::to_image() const {
    std::vector<double> px(cells_.begin(), cells_.end());
    return Image(width_, height_, std::move(px));
}

BinaryMap binary_map(const Image& img, const Direction& dir, double eta) {
    const Image shifted = shift_image(img, dir);
    BinaryMap map(img.width(), img.height());
    const auto a = img.pixels();
    const auto b = shifted.pixels();
    auto out = map.cells();
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] - b[i]) > eta ? 1 : 0;
    return map;
}

WeightImage weight_image(const Image& img, std::span<const Direction> directions, double eta) {
    WeightImage bwi(img.width(), img.height());
    for (const Direction& dir : directions) bwi.accumulate(binary_map(img, dir, eta));
    return bwi;
}

WeightImage weight_image(const Image& img, const FilterConfig& cfg) {
    cfg.validate();
    const auto dirs = enumerate_directions(Lattice{cfg.lattice});
    return weight_image(img, dirs, cfg.eta);
}

Image apply_weights(const Image& img, const WeightImage& bwi) {
    if (bwi.width() != img.width() || bwi.height() != img.height()) {
        throw InvalidArgument("weight image dimensions differ from input");
    }
    Image out = img;
    auto px = out.pixels();
    const auto wt = bwi.cells();
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = px[i] + px[i] * static_cast<double>(wt[i]);
    return out;
}

Image apply_filter(const Image& img, const FilterConfig& cfg) {
    return apply_weights(img, weight_image(img, cfg));
}

WeightImage mask_border(WeightImage bwi, int width) {
    if (width < 0) throw InvalidArgument("border width must be non-negative");
    for (int r = 0; r < bwi.height(); ++r) {
        for (int c = 0; c < bwi.width(); ++c) {
            if (r < width || c < width || r >= bwi.height() - width || c >= bwi.width() - width) {
                bwi(r, c) = 0;
            }
        }
    }
    return bwi;
}

} // namespace xnbf
