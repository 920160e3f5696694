#include "dfhc/png_io.hpp"

#include <png.h>

#include <cstring>
#include <fstream>
#include <string>

#include "dfhc/error.hpp"

namespace dfhc {

namespace {

png_uint_32 format_for(std::size_t channels) {
    return channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
}

PngPixels finish_read(png_image& image, const std::string& where) {
    if ((image.format & PNG_FORMAT_FLAG_COLOR) != 0) {
        image.format = PNG_FORMAT_RGB;
    } else {
        image.format = PNG_FORMAT_GRAY;
    }
    PngPixels out;
    out.width = image.width;
    out.height = image.height;
    out.channels = PNG_IMAGE_SAMPLE_CHANNELS(image.format);
    out.bytes.resize(PNG_IMAGE_SIZE(image));
    if (png_image_finish_read(&image, nullptr, out.bytes.data(), 0, nullptr) == 0) {
        const std::string msg = image.message;
        png_image_free(&image);
        throw IoError(where, "PNG decode failed: " + msg);
    }
    return out;
}

}  // namespace

std::vector<std::uint8_t> encode_png(const ImageRaster& img) {
    const std::vector<std::uint8_t> pixels = quantize_to_bytes(img);

    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width());
    image.height = static_cast<png_uint_32>(img.height());
    image.format = format_for(img.channels());

    png_alloc_size_t size = 0;
    if (png_image_write_to_memory(&image, nullptr, &size, 0, pixels.data(), 0, nullptr) == 0) {
        throw IoError("<memory>", std::string("PNG size query failed: ") + image.message);
    }
    std::vector<std::uint8_t> encoded(size);
    if (png_image_write_to_memory(&image, encoded.data(), &size, 0, pixels.data(), 0, nullptr) == 0) {
        throw IoError("<memory>", std::string("PNG encode failed: ") + image.message);
    }
    encoded.resize(size);
    return encoded;
}

void write_png(const std::filesystem::path& path, const ImageRaster& img) {
    const auto encoded = encode_png(img);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path.string(), "cannot open for writing");
    out.write(reinterpret_cast<const char*>(encoded.data()),
              static_cast<std::streamsize>(encoded.size()));
    if (!out) throw IoError(path.string(), "write failed");
}

PngPixels read_png(const std::filesystem::path& path) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (png_image_begin_read_from_file(&image, path.c_str()) == 0) {
        throw IoError(path.string(), std::string("cannot read PNG: ") + image.message);
    }
    return finish_read(image, path.string());
}

PngPixels decode_png(std::span<const std::uint8_t> encoded) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (png_image_begin_read_from_memory(&image, encoded.data(), encoded.size()) == 0) {
        throw IoError("<memory>", std::string("cannot read PNG: ") + image.message);
    }
    return finish_read(image, "<memory>");
}

ImageRaster to_raster(const PngPixels& pixels) {
    ImageRaster img(pixels.width, pixels.height, pixels.channels);
    auto data = img.data();
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = pixels.bytes[i] / 255.0;
    return img;
}

}  // namespace dfhc
