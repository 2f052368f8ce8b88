#pragma once

#include <filesystem>
#include <optional>
#include <string_view>

#include "xnbf/image.hpp"

namespace xnbf {

enum class ImageFormat { pgm, png, rawf32 };

/// clip01 clamps to [0,1] before quantizing; minmax maps [min,max] onto the full sample range.
enum class Scaling { clip01, minmax };

struct SaveOptions {
    Scaling scaling = Scaling::clip01;
    /// Sample depth for pgm/png; ignored for rawf32.
    int bit_depth = 8;
};

/// rawf32 sidecar path: `foo.raw` -> `foo.dim`.
std::filesystem::path raw_sidecar_path(const std::filesystem::path& path);

/// Guesses the format from the extension (.pgm, .png, .raw/.f32/.rawf32).
std::optional<ImageFormat> format_from_extension(const std::filesystem::path& path);
std::optional<ImageFormat> parse_format(std::string_view name);

/// Integer formats are scaled to [0,1] by the maximum sample value. Throws IoError.
Image load_image(const std::filesystem::path& path, ImageFormat format);
Image load_image(const std::filesystem::path& path);

/// Returns false when minmax scaling met a constant image (written as all zero).
bool save_image(const Image& img, const std::filesystem::path& path, ImageFormat format,
                const SaveOptions& options = {});
bool save_image(const Image& img, const std::filesystem::path& path, const SaveOptions& options = {});

} // namespace xnbf
