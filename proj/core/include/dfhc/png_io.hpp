#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "dfhc/image.hpp"

namespace dfhc {

/// Decoded 8-bit PNG: grayscale (1 channel) or truecolor (3 channels).
struct PngPixels {
    std::size_t width = 0;
    std::size_t height = 0;
    std::size_t channels = 0;
    std::vector<std::uint8_t> bytes;
};

/// Encodes the quantized raster as a non-interlaced 8-bit PNG in memory.
std::vector<std::uint8_t> encode_png(const ImageRaster& img);

/// encode_png + write; throws IoError naming the path.
void write_png(const std::filesystem::path& path, const ImageRaster& img);

/// Decodes a PNG file. Gray+alpha/RGBA inputs are flattened to gray/RGB.
PngPixels read_png(const std::filesystem::path& path);
PngPixels decode_png(std::span<const std::uint8_t> encoded);

/// Bytes back to reals in [0, 1] (b / 255).
ImageRaster to_raster(const PngPixels& pixels);

}  // namespace dfhc
