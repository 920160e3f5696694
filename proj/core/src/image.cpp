#include "dfhc/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dfhc/error.hpp"

namespace dfhc {

ImageRaster::ImageRaster(std::size_t width, std::size_t height, std::size_t channels, double fill)
    : width_(width), height_(height), channels_(channels), data_(width * height * channels, fill) {
    if (channels != 1 && channels != 3) {
        throw PreconditionError("raster channels must be 1 or 3, got " + std::to_string(channels));
    }
}

bool ImageRaster::in_unit_range() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return v >= 0.0 && v <= 1.0; });
}

std::vector<double> ImageRaster::plane(std::size_t c) const {
    std::vector<double> out(width_ * height_);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = data_[i * channels_ + c];
    return out;
}

void ImageRaster::set_plane(std::size_t c, std::span<const double> values) {
    if (values.size() != width_ * height_) {
        throw GeometryError("plane size " + std::to_string(values.size()) + " does not match " +
                            std::to_string(width_) + "x" + std::to_string(height_));
    }
    for (std::size_t i = 0; i < values.size(); ++i) data_[i * channels_ + c] = values[i];
}

namespace {

struct Tap {
    std::size_t lo;
    std::size_t hi;
    double frac;
};

std::vector<Tap> bilinear_taps(std::size_t in, std::size_t out) {
    std::vector<Tap> taps(out);
    const double scale = static_cast<double>(in) / static_cast<double>(out);
    for (std::size_t i = 0; i < out; ++i) {
        double src = (static_cast<double>(i) + 0.5) * scale - 0.5;
        src = std::clamp(src, 0.0, static_cast<double>(in - 1));
        const auto lo = static_cast<std::size_t>(src);
        const std::size_t hi = std::min(lo + 1, in - 1);
        taps[i] = {lo, hi, src - static_cast<double>(lo)};
    }
    return taps;
}

}  // namespace

ImageRaster resize_image(const ImageRaster& img, std::size_t target) {
    return resize_image(img, target, target);
}

ImageRaster resize_image(const ImageRaster& img, std::size_t target_width,
                         std::size_t target_height) {
    if (target_width == 0 || target_height == 0) {
        throw PreconditionError("resize target must be >= 1");
    }
    if (img.width() == 0 || img.height() == 0) {
        throw PreconditionError("cannot resize an empty raster");
    }
    if (img.width() == target_width && img.height() == target_height) return img;

    const auto xt = bilinear_taps(img.width(), target_width);
    const auto yt = bilinear_taps(img.height(), target_height);
    ImageRaster out(target_width, target_height, img.channels());
    for (std::size_t y = 0; y < target_height; ++y) {
        const Tap& ty = yt[y];
        for (std::size_t x = 0; x < target_width; ++x) {
            const Tap& tx = xt[x];
            for (std::size_t c = 0; c < img.channels(); ++c) {
                const double top = img.at(tx.lo, ty.lo, c) * (1.0 - tx.frac) + img.at(tx.hi, ty.lo, c) * tx.frac;
                const double bottom = img.at(tx.lo, ty.hi, c) * (1.0 - tx.frac) + img.at(tx.hi, ty.hi, c) * tx.frac;
                out.at(x, y, c) = std::clamp(top * (1.0 - ty.frac) + bottom * ty.frac, 0.0, 1.0);
            }
        }
    }
    return out;
}

std::uint8_t quantize_value(double v) noexcept {
    const double clamped = std::clamp(v, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::floor(clamped * 255.0 + 0.5));
}

std::vector<std::uint8_t> quantize_to_bytes(const ImageRaster& img) {
    std::vector<std::uint8_t> out(img.size());
    const auto data = img.data();
    std::transform(data.begin(), data.end(), out.begin(), quantize_value);
    return out;
}

void normalize_plane(std::span<double> plane) {
    if (plane.empty()) return;
    const auto [lo_it, hi_it] = std::minmax_element(plane.begin(), plane.end());
    const double lo = *lo_it;
    const double range = *hi_it - lo;
    if (!(range > 0.0)) {
        std::fill(plane.begin(), plane.end(), 0.0);
        return;
    }
    for (double& v : plane) v = (v - lo) / range;
}

}  // namespace dfhc
