#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dfhc/cnn/layers.hpp"
#include "dfhc/cnn/tensor.hpp"

namespace dfhc::cnn {

/// Per-sample input geometry (channels x height x width).
struct InputDims {
    std::size_t channels = 0;
    std::size_t height = 0;
    std::size_t width = 0;

    friend bool operator==(const InputDims&, const InputDims&) = default;
};

/// One ParamGrad per layer, same order as CnnModel::layers().
using Gradients = std::vector<ParamGrad>;

/// Ordered layer stack ending in Softmax over num_classes outputs.
class CnnModel {
public:
    CnnModel() = default;
    /// Validates that the stack chains from input to a num_classes softmax.
    /// Layer parameters are kept as given (a loaded checkpoint, say); call
    /// initialize() for fresh weights. seed is only recorded.
    CnnModel(InputDims input, std::vector<Layer> layers, std::uint64_t seed = 0);

    const InputDims& input() const noexcept { return input_; }
    const std::vector<Layer>& layers() const noexcept { return layers_; }
    std::vector<Layer>& mutable_layers() noexcept { return layers_; }
    std::size_t num_classes() const noexcept { return num_classes_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::size_t parameter_count() const noexcept;

    /// He-uniform weights (limit sqrt(6 / fan_in)), zero biases.
    void initialize(std::uint64_t seed);

    /// Class probabilities, shape (batch, num_classes, 1, 1).
    Tensor4 forward(const Tensor4& batch) const;

    /// argmax per sample (lowest index on ties).
    std::vector<std::size_t> predict(const Tensor4& batch) const;

    /// Mean cross-entropy of the batch; fills grads (resized as needed) with
    /// d(loss)/d(parameters). Softmax and cross-entropy are differentiated
    /// jointly: the gradient entering the last pre-softmax layer is
    /// (p - onehot) / batch.
    double loss_and_gradients(const Tensor4& batch, std::span<const std::size_t> labels,
                              Gradients& grads) const;

    Gradients make_gradients() const;

    /// Flat views of every parameter block (weights then bias, per layer).
    std::vector<std::span<double>> parameter_blocks();
    std::vector<std::span<const double>> parameter_blocks() const;

    friend bool operator==(const CnnModel&, const CnnModel&);

private:
    void check_input(const Tensor4& batch) const;

    InputDims input_;
    std::vector<Layer> layers_;
    std::size_t num_classes_ = 0;
    std::uint64_t seed_ = 0;
};

/// Four [Conv 3x3 + ReLU + MaxPool] stages with 8/16/32/64 filters, then
/// Dense(num_classes) + Softmax, He-uniform initialized from seed.
/// input_size must be 32 or 64.
CnnModel build_model(std::size_t input_size, std::size_t in_channels, std::size_t num_classes,
                     std::uint64_t seed);

/// SGD with momentum: v <- momentum * v + g; p <- p - lr * v.
class SgdMomentum {
public:
    SgdMomentum(double lr, double momentum) : lr_(lr), momentum_(momentum) {}

    /// One forward/backward/update on a batch; returns the pre-update loss.
    /// Throws DivergenceError on a non-finite loss or gradient.
    double step(CnnModel& model, const Tensor4& batch, std::span<const std::size_t> labels);

    double lr() const noexcept { return lr_; }
    double momentum() const noexcept { return momentum_; }

private:
    double lr_;
    double momentum_;
    Gradients velocity_;
    Gradients grads_;
};

/// Convenience wrapper: a single step with fresh optimizer state.
double backward_and_update(CnnModel& model, const Tensor4& batch, std::span<const std::size_t> labels,
                           double lr, double momentum);

}  // namespace dfhc::cnn
