#include "xnbf/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>

#include "xnbf/error.hpp"

namespace xnbf {

namespace fs = std::filesystem;

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

int max_sample(int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16) {
        throw InvalidArgument("bit depth must be 8 or 16, got " + std::to_string(bit_depth));
    }
    return bit_depth == 8 ? 255 : 65535;
}

// Maps intensities to integer samples, round-half-up. Returns false for a constant image under
// minmax scaling.
bool quantize(const Image& img, const SaveOptions& opts, std::vector<std::uint16_t>& out) {
    const int top = max_sample(opts.bit_depth);
    out.resize(img.size());
    const auto px = img.pixels();
    if (opts.scaling == Scaling::clip01) {
        for (std::size_t i = 0; i < px.size(); ++i) {
            const double v = std::clamp(px[i], 0.0, 1.0);
            out[i] = static_cast<std::uint16_t>(std::floor(v * top + 0.5));
        }
        return true;
    }
    const double lo = img.min();
    const double hi = img.max();
    if (!(hi > lo)) {
        std::fill(out.begin(), out.end(), std::uint16_t{0});
        return false;
    }
    for (std::size_t i = 0; i < px.size(); ++i) {
        const double v = (px[i] - lo) / (hi - lo);
        out[i] = static_cast<std::uint16_t>(std::clamp(std::floor(v * top + 0.5), 0.0, double(top)));
    }
    return true;
}

// ---- PGM -------------------------------------------------------------------------------------

// Next whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
    std::string tok;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {}
            continue;
        }
        if (std::isspace(ch)) {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(static_cast<char>(ch));
    }
    return tok;
}

int pgm_int(std::istream& in, const fs::path& path) {
    const std::string tok = pgm_token(in);
    if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](unsigned char c) { return std::isdigit(c); })) {
        throw IoError("malformed PGM header in " + path.string());
    }
    return std::stoi(tok);
}

Image load_pgm(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    const std::string magic = pgm_token(in);
    if (magic != "P2" && magic != "P5") throw IoError("not a PGM file: " + path.string());
    const int width = pgm_int(in, path);
    const int height = pgm_int(in, path);
    const int maxval = pgm_int(in, path);
    if (width < 1 || height < 1 || maxval < 1 || maxval > 65535) {
        throw IoError("malformed PGM header in " + path.string());
    }
    const std::size_t n = static_cast<std::size_t>(width) * height;
    std::vector<double> px(n);
    if (magic == "P2") {
        for (std::size_t i = 0; i < n; ++i) {
            long v;
            if (!(in >> v) || v < 0 || v > maxval) throw IoError("truncated or invalid P2 data in " + path.string());
            px[i] = static_cast<double>(v) / maxval;
        }
    } else {
        const int bytes = maxval < 256 ? 1 : 2;
        std::vector<unsigned char> raw(n * bytes);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
            throw IoError("truncated P5 data in " + path.string());
        }
        for (std::size_t i = 0; i < n; ++i) {
            const unsigned v = bytes == 1 ? raw[i] : (unsigned(raw[2 * i]) << 8) | raw[2 * i + 1];
            if (v > static_cast<unsigned>(maxval)) throw IoError("sample exceeds maxval in " + path.string());
            px[i] = static_cast<double>(v) / maxval;
        }
    }
    return Image(width, height, std::move(px));
}

void save_pgm(const fs::path& path, int width, int height, int bit_depth,
              const std::vector<std::uint16_t>& samples) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    const int top = max_sample(bit_depth);
    out << "P5\n" << width << ' ' << height << '\n' << top << '\n';
    std::vector<unsigned char> raw;
    raw.reserve(samples.size() * (bit_depth / 8));
    for (std::uint16_t s : samples) {
        if (bit_depth == 16) raw.push_back(static_cast<unsigned char>(s >> 8));
        raw.push_back(static_cast<unsigned char>(s & 0xFF));
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

// ---- PNG -------------------------------------------------------------------------------------

struct FileCloser {
    void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void png_fail(png_structp, png_const_charp msg) {
    throw IoError(std::string("png: ") + msg);
}

void png_warn(png_structp, png_const_charp) {}

Image load_png(const fs::path& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IoError("cannot open " + path.string());
    unsigned char sig[8];
    if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
        throw IoError("not a PNG file: " + path.string());
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, png_warn);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("png: out of memory");
    }
    struct Guard {
        png_structp* p;
        png_infop* i;
        ~Guard() { png_destroy_read_struct(p, i, nullptr); }
    } guard{&png, &info};

    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);
    const auto width = png_get_image_width(png, info);
    const auto height = png_get_image_height(png, info);
    const int color = png_get_color_type(png, info);
    int depth = png_get_bit_depth(png, info);
    if (color != PNG_COLOR_TYPE_GRAY) {
        throw IoError("only grayscale PNG is supported: " + path.string());
    }
    if (depth < 8) {
        png_set_expand_gray_1_2_4_to_8(png);
        depth = 8;
    }
    if (depth == 16 && std::endian::native == std::endian::little) png_set_swap(png);
    png_read_update_info(png, info);

    const std::size_t rowbytes = png_get_rowbytes(png, info);
    std::vector<unsigned char> data(rowbytes * height);
    std::vector<png_bytep> rows(height);
    for (png_uint_32 r = 0; r < height; ++r) rows[r] = data.data() + r * rowbytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);

    const double top = depth == 16 ? 65535.0 : 255.0;
    std::vector<double> px(static_cast<std::size_t>(width) * height);
    for (png_uint_32 r = 0; r < height; ++r) {
        for (png_uint_32 c = 0; c < width; ++c) {
            unsigned v;
            if (depth == 16) {
                std::uint16_t s;
                std::memcpy(&s, rows[r] + 2 * c, 2);
                v = s;
            } else {
                v = rows[r][c];
            }
            px[static_cast<std::size_t>(r) * width + c] = v / top;
        }
    }
    return Image(static_cast<int>(width), static_cast<int>(height), std::move(px));
}

void save_png(const fs::path& path, int width, int height, int bit_depth,
              const std::vector<std::uint16_t>& samples) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw IoError("cannot write " + path.string());
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, png_warn);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError("png: out of memory");
    }
    struct Guard {
        png_structp* p;
        png_infop* i;
        ~Guard() { png_destroy_write_struct(p, i); }
    } guard{&png, &info};

    png_init_io(png, fp.get());
    png_set_IHDR(png, info, width, height, bit_depth, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const int bytes = bit_depth / 8;
    std::vector<unsigned char> row(static_cast<std::size_t>(width) * bytes);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            const std::uint16_t s = samples[static_cast<std::size_t>(r) * width + c];
            if (bytes == 2) {
                row[2 * c] = static_cast<unsigned char>(s >> 8);
                row[2 * c + 1] = static_cast<unsigned char>(s & 0xFF);
            } else {
                row[c] = static_cast<unsigned char>(s);
            }
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
}

// ---- rawf32 ----------------------------------------------------------------------------------

Image load_raw(const fs::path& path) {
    const fs::path dim = raw_sidecar_path(path);
    std::ifstream dims(dim);
    if (!dims) throw IoError("missing sidecar " + dim.string());
    long width = 0, height = 0;
    if (!(dims >> width >> height) || width < 1 || height < 1) {
        throw IoError("malformed sidecar " + dim.string());
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    const std::size_t n = static_cast<std::size_t>(width) * height;
    std::vector<unsigned char> raw(n * 4);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size() || in.peek() != EOF) {
        throw IoError("size of " + path.string() + " does not match " + std::to_string(width) + "x" +
                      std::to_string(height) + " from sidecar");
    }
    std::vector<double> px(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t bits = std::uint32_t(raw[4 * i]) | std::uint32_t(raw[4 * i + 1]) << 8 |
                             std::uint32_t(raw[4 * i + 2]) << 16 | std::uint32_t(raw[4 * i + 3]) << 24;
        px[i] = std::bit_cast<float>(bits);
        if (!std::isfinite(px[i])) throw IoError("non-finite sample in " + path.string());
    }
    return Image(static_cast<int>(width), static_cast<int>(height), std::move(px));
}

void save_raw(const Image& img, const fs::path& path) {
    std::vector<unsigned char> raw(img.size() * 4);
    const auto px = img.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
        const float f = static_cast<float>(px[i]);
        if (!std::isfinite(f)) throw InvalidArgument("intensity outside float range");
        const auto bits = std::bit_cast<std::uint32_t>(f);
        for (int b = 0; b < 4; ++b) raw[4 * i + b] = static_cast<unsigned char>(bits >> (8 * b));
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw IoError("write failed: " + path.string());
    std::ofstream dims(raw_sidecar_path(path));
    if (!dims) throw IoError("cannot write " + raw_sidecar_path(path).string());
    dims << img.width() << ' ' << img.height() << '\n';
}

} // namespace

fs::path raw_sidecar_path(const fs::path& path) {
    fs::path dim = path;
    dim.replace_extension(".dim");
    return dim;
}

std::optional<ImageFormat> parse_format(std::string_view name) {
    const std::string n = lower(std::string(name));
    if (n == "pgm") return ImageFormat::pgm;
    if (n == "png") return ImageFormat::png;
    if (n == "rawf32" || n == "raw" || n == "f32") return ImageFormat::rawf32;
    return std::nullopt;
}

std::optional<ImageFormat> format_from_extension(const fs::path& path) {
    std::string ext = path.extension().string();
    if (ext.empty()) return std::nullopt;
    return parse_format(std::string_view(ext).substr(1));
}

Image load_image(const fs::path& path, ImageFormat format) {
    if (!fs::exists(path)) throw IoError("no such file: " + path.string());
    switch (format) {
    case ImageFormat::pgm: return load_pgm(path);
    case ImageFormat::png: return load_png(path);
    case ImageFormat::rawf32: return load_raw(path);
    }
    throw InvalidArgument("unknown image format");
}

Image load_image(const fs::path& path) {
    const auto fmt = format_from_extension(path);
    if (!fmt) throw IoError("cannot infer image format of " + path.string());
    return load_image(path, *fmt);
}

bool save_image(const Image& img, const fs::path& path, ImageFormat format, const SaveOptions& options) {
    if (img.empty()) throw InvalidArgument("cannot save an empty image");
    if (format == ImageFormat::rawf32) {
        save_raw(img, path);
        return true;
    }
    std::vector<std::uint16_t> samples;
    const bool ok = quantize(img, options, samples);
    if (format == ImageFormat::pgm) {
        save_pgm(path, img.width(), img.height(), options.bit_depth, samples);
    } else {
        save_png(path, img.width(), img.height(), options.bit_depth, samples);
    }
    return ok;
}

bool save_image(const Image& img, const fs::path& path, const SaveOptions& options) {
    const auto fmt = format_from_extension(path);
    if (!fmt) throw IoError("cannot infer image format of " + path.string());
    return save_image(img, path, *fmt, options);
}

} // namespace xnbf
