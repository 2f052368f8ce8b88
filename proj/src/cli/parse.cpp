#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "xnbf/cli.hpp"
#include "xnbf/error.hpp"

namespace xnbf::cli {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& tok, std::string_view what) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (tok.empty() || end != tok.c_str() + tok.size() || !std::isfinite(v)) {
        throw InvalidArgument("bad number '" + tok + "' in " + std::string(what));
    }
    return v;
}

int to_int(const std::string& tok, std::string_view what) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw InvalidArgument("bad integer '" + tok + "' in " + std::string(what));
    }
    return v;
}

} // namespace

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        std::string tok = trim(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start));
        if (tok.empty()) throw InvalidArgument("empty entry in list '" + std::string(text) + "'");
        out.push_back(std::move(tok));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

Roi parse_roi(std::string_view text) {
    const auto parts = split_list(text);
    if (parts.size() != 4) throw InvalidArgument("roi must be x0,y0,w,h; got '" + std::string(text) + "'");
    Roi roi{to_int(parts[0], "roi"), to_int(parts[1], "roi"), to_int(parts[2], "roi"), to_int(parts[3], "roi")};
    if (roi.w < 1 || roi.h < 1 || roi.x0 < 0 || roi.y0 < 0) {
        throw InvalidArgument("roi needs non-negative origin and positive extent");
    }
    return roi;
}

std::vector<double> parse_range(std::string_view text) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto colon = text.find(':', start);
        parts.push_back(trim(text.substr(start, colon == std::string_view::npos ? text.npos : colon - start)));
        if (colon == std::string_view::npos) break;
        start = colon + 1;
    }
    if (parts.size() != 3) throw InvalidArgument("range must be start:step:stop; got '" + std::string(text) + "'");
    const double first = to_double(parts[0], "range");
    const double step = to_double(parts[1], "range");
    const double last = to_double(parts[2], "range");
    if (!(step > 0.0) || last < first) throw InvalidArgument("empty range '" + std::string(text) + "'");

    std::vector<double> values;
    for (long k = 0;; ++k) {
        const double v = first + static_cast<double>(k) * step;
        if (v > last + 1e-9 * step) break;
        // Snap values that are a rounding error away from a short decimal.
        values.push_back(std::stod(format_number(std::round(v * 1e12) / 1e12)));
    }
    return values;
}

std::string format_number(double v) {
    char buf[64];
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    return buf;
}

} // namespace xnbf::cli
