#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "xnbf/image.hpp"
#include "xnbf/noise.hpp"

namespace xnbf {

/// Two concentric discs on a background (inner disc, annulus, background).
struct PhantomSpec {
    int height = 256;
    int width = 256;
    double centerRow = 128.0;
    double centerCol = 128.0;
    double rOuter = 90.0;
    double rInner = 42.0;
    double muBackground = 0.15;
    double muAnnulus = 0.650;
    double muInner = 0.655;
    double noisePercent = 0.0;
    RngSeed seed{};

    void validate() const;
    /// sigma = noisePercent / 100 * muInner
    double noise_sigma() const noexcept { return noisePercent / 100.0 * muInner; }
};

/// Flat `key=value` lines; keys mirror the PhantomSpec fields, `#` starts a comment.
PhantomSpec parse_phantom_spec(std::istream& in, PhantomSpec base = {});
PhantomSpec load_phantom_spec(const std::filesystem::path& path, PhantomSpec base = {});
std::string to_string(const PhantomSpec& spec);

Image make_phantom(const PhantomSpec& spec);

struct PhantomRegions {
    Mask inner;
    Mask annulus;
    Mask background;
};

PhantomRegions phantom_regions(const PhantomSpec& spec);

/// Axis-aligned square inscribed in the outer circle: covers the inner disc and annulus only.
Roi phantom_roi(const PhantomSpec& spec);

/// Pixels whose distance from the centre lies in [rmin, rmax].
Mask radial_band(const PhantomSpec& spec, double rmin, double rmax);

/// Annulus pixels at least `outerMargin` from the outer circle, i.e. outside the reach of
/// the annulus/background edge.
Mask annulus_core(const PhantomSpec& spec, double outerMargin);

} // namespace xnbf
