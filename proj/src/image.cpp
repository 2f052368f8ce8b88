#include "xnbf/image.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "xnbf/error.hpp"

namespace xnbf {

namespace {

void check_dims(int width, int height) {
    if (width < 1 || height < 1) {
        throw InvalidArgument("image dimensions must be positive, got " + std::to_string(width) +
                              "x" + std::to_string(height));
    }
}

} // namespace

Image::Image(int width, int height, double fill) : width_(width), height_(height) {
    check_dims(width, height);
    if (!std::isfinite(fill)) {
        throw InvalidArgument("image fill value must be finite");
    }
    pixels_.assign(static_cast<std::size_t>(width) * height, fill);
}

Image::Image(int width, int height, std::vector<double> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    check_dims(width, height);
    if (pixels_.size() != static_cast<std::size_t>(width) * height) {
        throw InvalidArgument("pixel count " + std::to_string(pixels_.size()) +
                              " does not match " + std::to_string(width) + "x" +
                              std::to_string(height));
    }
    if (!std::all_of(pixels_.begin(), pixels_.end(), [](double v) { return std::isfinite(v); })) {
        throw InvalidArgument("image contains non-finite intensities");
    }
}

double Image::min() const {
    if (pixels_.empty()) throw InvalidArgument("min of empty image");
    return *std::min_element(pixels_.begin(), pixels_.end());
}

double Image::max() const {
    if (pixels_.empty()) throw InvalidArgument("max of empty image");
    return *std::max_element(pixels_.begin(), pixels_.end());
}

double Image::mean() const {
    if (pixels_.empty()) throw InvalidArgument("mean of empty image");
    return std::accumulate(pixels_.begin(), pixels_.end(), 0.0) / static_cast<double>(pixels_.size());
}

Mask::Mask(int width, int height, bool fill) : width_(width), height_(height) {
    check_dims(width, height);
    cells_.assign(static_cast<std::size_t>(width) * height, fill ? 1 : 0);
}

std::size_t Mask::count() const noexcept {
    return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

Image extract_roi(const Image& img, const Roi& roi) {
    if (!roi.fits(img.width(), img.height())) {
        throw InvalidArgument("roi " + std::to_string(roi.x0) + "," + std::to_string(roi.y0) + "," +
                              std::to_string(roi.w) + "," + std::to_string(roi.h) +
                              " outside image bounds");
    }
    Image out(roi.w, roi.h);
    for (int r = 0; r < roi.h; ++r) {
        for (int c = 0; c < roi.w; ++c) {
            out(r, c) = img(roi.y0 + r, roi.x0 + c);
        }
    }
    return out;
}

std::vector<double> roi_samples(const Image& img, const Roi& roi) {
    const Image crop = extract_roi(img, roi);
    return {crop.pixels().begin(), crop.pixels().end()};
}

std::vector<double> line_profile(const Image& img, Axis axis, int index, int from, int to) {
    const int extent = axis == Axis::row ? img.width() : img.height();
    const int lines = axis == Axis::row ? img.height() : img.width();
    if (index < 0 || index >= lines || from < 0 || to >= extent || from > to) {
        throw InvalidArgument("line profile arguments out of range");
    }
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(to - from + 1));
    for (int k = from; k <= to; ++k) {
        out.push_back(axis == Axis::row ? img(index, k) : img(k, index));
    }
    return out;
}

double masked_mean(const Image& img, const Mask& mask) {
    if (mask.width() != img.width() || mask.height() != img.height()) {
        throw InvalidArgument("mask and image dimensions differ");
    }
    // accumulate offsets from the first selected pixel: constant regions come out exact
    double sum = 0.0;
    double ref = 0.0;
    std::size_t n = 0;
    const auto px = img.pixels();
    const auto cells = mask.cells();
    for (std::size_t i = 0; i < px.size(); ++i) {
        if (cells[i]) {
            if (n == 0) ref = px[i];
            sum += px[i] - ref;
            ++n;
        }
    }
    if (n == 0) throw InvalidArgument("empty mask");
    return ref + sum / static_cast<double>(n);
}

} // namespace xnbf
