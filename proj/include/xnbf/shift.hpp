#pragma once

#include "xnbf/image.hpp"
#include "xnbf/neighborhood.hpp"

namespace xnbf {

/// Maps each pixel's neighbour along `dir` onto the pixel itself, zero-filling vacated cells.
/// Quadrant I is L^l I L^m, II is L^l I U^m, III is U^l I U^m, IV is U^l I L^m; the axis
/// directions are I L, I U, L I and U I.
Image shift_image(const Image& img, const Direction& dir);

/// Same as shift_image with explicit exponents, allowing l = m = 0 (identity).
Image shift_image(const Image& img, Quadrant quadrant, int l, int m);

/// Slow reference: builds the N x N lower/upper shift matrices, zero-pads to square, forms the
/// literal matrix products by exponentiation and crops back.
Image shift_oracle(const Image& img, Quadrant quadrant, int l, int m);
Image shift_oracle(const Image& img, const Direction& dir);

/// Whether shifts that move the whole image out print a warning to stderr (default on).
void set_shift_warnings(bool enabled) noexcept;

} // namespace xnbf
