#include "xnbf/shift.hpp"

#include <algorithm>
#include <atomic>
#include <iostream>
#include <vector>

#include "xnbf/error.hpp"

namespace xnbf {

namespace {

Offset offset_of(Quadrant quadrant, int l, int m) {
    if (l < 0 || m < 0) throw InvalidArgument("shift exponents must be non-negative");
    const bool horizontal = quadrant == Quadrant::axis_right || quadrant == Quadrant::axis_left;
    const bool vertical = quadrant == Quadrant::axis_up || quadrant == Quadrant::axis_down;
    if ((horizontal && l != 0) || (vertical && m != 0)) {
        throw InvalidArgument("axis shift takes a single exponent");
    }
    return Direction{quadrant, l, m}.offset();
}

std::atomic<bool> g_warnings{true};

void warn_if_vacated(const Image& img, Offset off) {
    if (!g_warnings.load(std::memory_order_relaxed)) return;
    if (std::abs(off.drow) >= img.height() || std::abs(off.dcol) >= img.width()) {
        std::cerr << "warning: shift (" << off.drow << ", " << off.dcol
                  << ") exceeds image size; result is all zero\n";
    }
}

// Dense square matrix, row-major.
struct Matrix {
    int n;
    std::vector<double> a;

    explicit Matrix(int size) : n(size), a(static_cast<std::size_t>(size) * size, 0.0) {}
    double& at(int r, int c) { return a[static_cast<std::size_t>(r) * n + c]; }
    double at(int r, int c) const { return a[static_cast<std::size_t>(r) * n + c]; }

    static Matrix identity(int size) {
        Matrix m(size);
        for (int i = 0; i < size; ++i) m.at(i, i) = 1.0;
        return m;
    }
    // Ones on the sub-diagonal.
    static Matrix lower(int size) {
        Matrix m(size);
        for (int i = 1; i < size; ++i) m.at(i, i - 1) = 1.0;
        return m;
    }
    // Ones on the super-diagonal.
    static Matrix upper(int size) {
        Matrix m(size);
        for (int i = 0; i + 1 < size; ++i) m.at(i, i + 1) = 1.0;
        return m;
    }
};

Matrix multiply(const Matrix& x, const Matrix& y) {
    Matrix out(x.n);
    for (int r = 0; r < x.n; ++r) {
        for (int c = 0; c < x.n; ++c) {
            double acc = 0.0;
            for (int k = 0; k < x.n; ++k) acc += x.at(r, k) * y.at(k, c);
            out.at(r, c) = acc;
        }
    }
    return out;
}

Matrix power(const Matrix& base, int e) {
    Matrix out = Matrix::identity(base.n);
    for (int i = 0; i < e; ++i) out = multiply(out, base);
    return out;
}

} // namespace

Image shift_image(const Image& img, Quadrant quadrant, int l, int m) {
    const Offset off = offset_of(quadrant, l, m);
    warn_if_vacated(img, off);
    Image out(img.width(), img.height(), 0.0);
    const int h = img.height();
    const int w = img.width();
    const int r0 = std::max(0, -off.drow);
    const int r1 = std::min(h, h - off.drow);
    const int c0 = std::max(0, -off.dcol);
    const int c1 = std::min(w, w - off.dcol);
    for (int r = r0; r < r1; ++r) {
        for (int c = c0; c < c1; ++c) {
            out(r, c) = img(r + off.drow, c + off.dcol);
        }
    }
    return out;
}

Image shift_image(const Image& img, const Direction& dir) {
    dir.validate();
    return shift_image(img, dir.quadrant, dir.l, dir.m);
}

Image shift_oracle(const Image& img, Quadrant quadrant, int l, int m) {
    warn_if_vacated(img, offset_of(quadrant, l, m));
    const int n = std::max(img.width(), img.height());
    Matrix padded(n);
    for (int r = 0; r < img.height(); ++r) {
        for (int c = 0; c < img.width(); ++c) padded.at(r, c) = img(r, c);
    }
    const Matrix lo = Matrix::lower(n);
    const Matrix up = Matrix::upper(n);

    bool pre_lower = false;
    bool post_lower = false;
    switch (quadrant) {
    case Quadrant::I: pre_lower = true; post_lower = true; break;
    case Quadrant::II: pre_lower = true; post_lower = false; break;
    case Quadrant::III: pre_lower = false; post_lower = false; break;
    case Quadrant::IV: pre_lower = false; post_lower = true; break;
    case Quadrant::axis_right: post_lower = true; break;  // I L
    case Quadrant::axis_left: post_lower = false; break;  // I U
    case Quadrant::axis_up: pre_lower = true; break;      // L I
    case Quadrant::axis_down: pre_lower = false; break;   // U I
    }
    const Matrix pre = power(pre_lower ? lo : up, l);
    const Matrix post = power(post_lower ? lo : up, m);
    const Matrix product = multiply(multiply(pre, padded), post);

    Image out(img.width(), img.height(), 0.0);
    for (int r = 0; r < img.height(); ++r) {
        for (int c = 0; c < img.width(); ++c) out(r, c) = product.at(r, c);
    }
    return out;
}

Image shift_oracle(const Image& img, const Direction& dir) {
    dir.validate();
    return shift_oracle(img, dir.quadrant, dir.l, dir.m);
}

void set_shift_warnings(bool enabled) noexcept { g_warnings.store(enabled, std::memory_order_relaxed); }

} // namespace xnbf
