#include "xnbf/phantom.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "xnbf/error.hpp"

namespace xnbf {

namespace {

double radius_at(const PhantomSpec& spec, int r, int c) {
    return std::hypot(r - spec.centerRow, c - spec.centerCol);
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

void PhantomSpec::validate() const {
    if (height < 1 || width < 1) throw InvalidArgument("phantom size must be positive");
    if (!(rInner > 0.0)) throw InvalidArgument("phantom inner radius must be positive");
    if (!(rInner < rOuter)) throw InvalidArgument("phantom inner radius must be below the outer radius");
    if (rOuter > std::min(height, width) / 2.0) {
        throw InvalidArgument("phantom outer radius exceeds half the image size");
    }
    if (!(noisePercent >= 0.0)) throw InvalidArgument("phantom noise percent must be non-negative");
    for (double v : {centerRow, centerCol, muBackground, muAnnulus, muInner, noisePercent}) {
        if (!std::isfinite(v)) throw InvalidArgument("phantom parameters must be finite");
    }
}

PhantomSpec parse_phantom_spec(std::istream& in, PhantomSpec spec) {
    const std::map<std::string, std::function<void(const std::string&)>> setters = {
        {"height", [&](const std::string& v) { spec.height = std::stoi(v); }},
        {"width", [&](const std::string& v) { spec.width = std::stoi(v); }},
        {"centerRow", [&](const std::string& v) { spec.centerRow = std::stod(v); }},
        {"centerCol", [&](const std::string& v) { spec.centerCol = std::stod(v); }},
        {"rOuter", [&](const std::string& v) { spec.rOuter = std::stod(v); }},
        {"rInner", [&](const std::string& v) { spec.rInner = std::stod(v); }},
        {"muBackground", [&](const std::string& v) { spec.muBackground = std::stod(v); }},
        {"muAnnulus", [&](const std::string& v) { spec.muAnnulus = std::stod(v); }},
        {"muInner", [&](const std::string& v) { spec.muInner = std::stod(v); }},
        {"noisePercent", [&](const std::string& v) { spec.noisePercent = std::stod(v); }},
        {"seed", [&](const std::string& v) { spec.seed.value = std::stoull(v); }},
    };
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw InvalidArgument("phantom spec line " + std::to_string(lineno) + ": expected key=value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end()) {
            throw InvalidArgument("phantom spec line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
        try {
            it->second(value);
        } catch (const std::logic_error&) {
            throw InvalidArgument("phantom spec line " + std::to_string(lineno) + ": bad value '" + value + "'");
        }
    }
    spec.validate();
    return spec;
}

PhantomSpec load_phantom_spec(const std::filesystem::path& path, PhantomSpec base) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open phantom spec " + path.string());
    return parse_phantom_spec(in, base);
}

std::string to_string(const PhantomSpec& spec) {
    // shortest text that reads back to the same double
    auto num = [](double v) {
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, res.ptr);
    };
    std::ostringstream os;
    os << "height=" << spec.height << "\nwidth=" << spec.width << "\ncenterRow=" << num(spec.centerRow)
       << "\ncenterCol=" << num(spec.centerCol) << "\nrOuter=" << num(spec.rOuter) << "\nrInner=" << num(spec.rInner)
       << "\nmuBackground=" << num(spec.muBackground) << "\nmuAnnulus=" << num(spec.muAnnulus)
       << "\nmuInner=" << num(spec.muInner) << "\nnoisePercent=" << num(spec.noisePercent)
       << "\nseed=" << spec.seed.value << '\n';
    return os.str();
}

Image make_phantom(const PhantomSpec& spec) {
    spec.validate();
    Image img(spec.width, spec.height);
    for (int r = 0; r < spec.height; ++r) {
        for (int c = 0; c < spec.width; ++c) {
            const double d = radius_at(spec, r, c);
            img(r, c) = d <= spec.rInner ? spec.muInner : (d <= spec.rOuter ? spec.muAnnulus : spec.muBackground);
        }
    }
    return add_gaussian_noise(img, spec.noise_sigma(), spec.seed);
}

PhantomRegions phantom_regions(const PhantomSpec& spec) {
    spec.validate();
    PhantomRegions regions{Mask(spec.width, spec.height), Mask(spec.width, spec.height),
                           Mask(spec.width, spec.height)};
    for (int r = 0; r < spec.height; ++r) {
        for (int c = 0; c < spec.width; ++c) {
            const double d = radius_at(spec, r, c);
            if (d <= spec.rInner) {
                regions.inner.set(r, c, true);
            } else if (d <= spec.rOuter) {
                regions.annulus.set(r, c, true);
            } else {
                regions.background.set(r, c, true);
            }
        }
    }
    return regions;
}

Roi phantom_roi(const PhantomSpec& spec) {
    spec.validate();
    const int half = static_cast<int>(std::floor(spec.rOuter / std::sqrt(2.0)));
    const int r0 = static_cast<int>(std::ceil(spec.centerRow)) - half;
    const int c0 = static_cast<int>(std::ceil(spec.centerCol)) - half;
    Roi roi{std::max(0, c0), std::max(0, r0), 2 * half + 1, 2 * half + 1};
    roi.w = std::min(roi.w, spec.width - roi.x0);
    roi.h = std::min(roi.h, spec.height - roi.y0);
    return roi;
}

Mask radial_band(const PhantomSpec& spec, double rmin, double rmax) {
    Mask band(spec.width, spec.height);
    for (int r = 0; r < spec.height; ++r) {
        for (int c = 0; c < spec.width; ++c) {
            const double d = radius_at(spec, r, c);
            band.set(r, c, d >= rmin && d <= rmax);
        }
    }
    return band;
}

Mask annulus_core(const PhantomSpec& spec, double outerMargin) {
    Mask core(spec.width, spec.height);
    for (int r = 0; r < spec.height; ++r) {
        for (int c = 0; c < spec.width; ++c) {
            const double d = radius_at(spec, r, c);
            core.set(r, c, d > spec.rInner && d <= spec.rOuter - outerMargin);
        }
    }
    return core;
}

} // namespace xnbf
