#pragma once

// Layer kinds of the classifier and their exact forward/backward passes.
// Layers are plain values; activations needed by backward are passed in
// explicitly so a model can be shared read-only between threads.

#include <cstddef>
#include <string_view>
#include <variant>
#include <vector>

#include "dfhc/cnn/tensor.hpp"

namespace dfhc::cnn {

/// Zero-padded "same" convolution, odd square kernel, stride 1.
/// weights are laid out [out][in][ky][kx].
struct Conv2D {
    std::size_t in_channels = 0;
    std::size_t out_channels = 0;
    std::size_t kernel = 3;
    std::vector<double> weights;
    std::vector<double> bias;

    Conv2D() = default;
    Conv2D(std::size_t in, std::size_t out, std::size_t k = 3);
};

struct ReLU {};

/// 2x2 window, stride 2. Odd trailing rows/columns are dropped.
struct MaxPool2 {};

/// Fully connected layer over the flattened sample; weights are [out][in].
struct Dense {
    std::size_t in_features = 0;
    std::size_t out_features = 0;
    std::vector<double> weights;
    std::vector<double> bias;

    Dense() = default;
    Dense(std::size_t in, std::size_t out);
};

/// Row-wise softmax over the flattened sample.
struct Softmax {};

using Layer = std::variant<Conv2D, ReLU, MaxPool2, Dense, Softmax>;

/// Gradient storage mirroring a layer's parameters (empty for stateless layers).
struct ParamGrad {
    std::vector<double> weights;
    std::vector<double> bias;

    void zero();
};

std::string_view layer_kind(const Layer& layer) noexcept;

/// Throws PreconditionError when the layer cannot accept the input shape.
Shape output_shape(const Layer& layer, const Shape& in);

Tensor4 forward(const Layer& layer, const Tensor4& in);

/// Returns dL/d(in) given dL/d(out); parameter gradients are accumulated
/// into grad (which must be sized by make_grad).
Tensor4 backward(const Layer& layer, const Tensor4& in, const Tensor4& out, const Tensor4& grad_out,
                 ParamGrad& grad);

ParamGrad make_grad(const Layer& layer);

std::size_t parameter_count(const Layer& layer) noexcept;

}  // namespace dfhc::cnn
