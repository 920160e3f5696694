#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace dfhc::cnn {

struct Shape {
    std::size_t n = 0;  ///< batch
    std::size_t c = 0;  ///< channels
    std::size_t h = 0;
    std::size_t w = 0;

    std::size_t count() const noexcept { return n * c * h * w; }
    std::size_t per_sample() const noexcept { return c * h * w; }
    std::string str() const;

    friend bool operator==(const Shape&, const Shape&) = default;
};

/// Dense NCHW tensor of doubles.
class Tensor4 {
public:
    Tensor4() = default;
    explicit Tensor4(Shape shape, double fill = 0.0) : shape_(shape), data_(shape.count(), fill) {}

    const Shape& shape() const noexcept { return shape_; }
    std::size_t size() const noexcept { return data_.size(); }

    double& at(std::size_t n, std::size_t c, std::size_t y, std::size_t x) {
        return data_[((n * shape_.c + c) * shape_.h + y) * shape_.w + x];
    }
    const double& at(std::size_t n, std::size_t c, std::size_t y, std::size_t x) const {
        return data_[((n * shape_.c + c) * shape_.h + y) * shape_.w + x];
    }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    std::span<double> sample(std::size_t n) noexcept {
        return std::span<double>(data_).subspan(n * shape_.per_sample(), shape_.per_sample());
    }
    std::span<const double> sample(std::size_t n) const noexcept {
        return std::span<const double>(data_).subspan(n * shape_.per_sample(), shape_.per_sample());
    }

    bool all_finite() const noexcept;

    friend bool operator==(const Tensor4&, const Tensor4&) = default;

private:
    Shape shape_;
    std::vector<double> data_;
};

}  // namespace dfhc::cnn
