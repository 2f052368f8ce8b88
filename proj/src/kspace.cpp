#include "xnbf/bw_filter.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>

#include "xnbf/error.hpp"

namespace xnbf {

namespace {

struct FftwFree {
    void operator()(void* p) const noexcept { fftw_free(p); }
};

// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

} // namespace

Image kspace_magnitude(const Image& component) {
    const int h = component.height();
    const int w = component.width();
    const std::size_t n = static_cast<std::size_t>(h) * w;
    std::unique_ptr<fftw_complex, FftwFree> buf(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
    if (!buf) throw Error("fftw_malloc failed");

    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_2d(h, w, buf.get(), buf.get(), FFTW_FORWARD, FFTW_ESTIMATE);
    }
    const auto px = component.pixels();
    for (std::size_t i = 0; i < n; ++i) {
        buf.get()[i][0] = px[i];
        buf.get()[i][1] = 0.0;
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }

    // Move DC to (h/2, w/2).
    Image out(w, h);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const fftw_complex& z = buf.get()[static_cast<std::size_t>(r) * w + c];
            const double mag = std::hypot(z[0], z[1]);
            out((r + h / 2) % h, (c + w / 2) % w) = std::log1p(mag);
        }
    }
    return out;
}

Image direction_kspace(const Image& sample, const Direction& dir, const FilterConfig& cfg,
                       KspaceSource source) {
    cfg.validate();
    dir.validate();
    const BinaryMap map = binary_map(sample, dir, cfg.eta);
    Image component(sample.width(), sample.height());
    const auto b = map.cells();
    const auto s = sample.pixels();
    auto out = component.pixels();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = source == KspaceSource::weighted ? s[i] * b[i] : static_cast<double>(b[i]);
    }
    return kspace_magnitude(component);
}

} // namespace xnbf
