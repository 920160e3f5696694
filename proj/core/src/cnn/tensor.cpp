#include "dfhc/cnn/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace dfhc::cnn {

std::string Shape::str() const {
    return "(" + std::to_string(n) + ", " + std::to_string(c) + ", " + std::to_string(h) + ", " +
           std::to_string(w) + ")";
}

bool Tensor4::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace dfhc::cnn
