#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dfhc {

/// width x height x channels reals, row-major with interleaved channels.
/// Public encoders only ever hand out rasters whose values lie in [0, 1].
class ImageRaster {
public:
    ImageRaster() = default;
    ImageRaster(std::size_t width, std::size_t height, std::size_t channels, double fill = 0.0);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t channels() const noexcept { return channels_; }
    std::size_t size() const noexcept { return data_.size(); }

    double& at(std::size_t x, std::size_t y, std::size_t c = 0) {
        return data_[(y * width_ + x) * channels_ + c];
    }
    double at(std::size_t x, std::size_t y, std::size_t c = 0) const {
        return data_[(y * width_ + x) * channels_ + c];
    }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    bool in_unit_range() const noexcept;

    /// One channel as a dense row-major plane.
    std::vector<double> plane(std::size_t c) const;
    void set_plane(std::size_t c, std::span<const double> values);

    friend bool operator==(const ImageRaster&, const ImageRaster&) = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::size_t channels_ = 0;
    std::vector<double> data_;
};

/// Bilinear resampling to target x target using pixel-center alignment
/// (src = (dst + 0.5) * in / out - 0.5, clamped at the borders).
ImageRaster resize_image(const ImageRaster& img, std::size_t target);
ImageRaster resize_image(const ImageRaster& img, std::size_t target_width, std::size_t target_height);

/// v -> floor(v * 255 + 0.5), after clamping v into [0, 1].
std::uint8_t quantize_value(double v) noexcept;

/// 8-bit interleaved bytes of the raster, one byte per sample.
std::vector<std::uint8_t> quantize_to_bytes(const ImageRaster& img);

/// Min-max normalizes one channel in place; a constant channel becomes 0.
void normalize_plane(std::span<double> plane);

}  // namespace dfhc
