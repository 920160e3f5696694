#include "dfhc/cnn/model.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "dfhc/error.hpp"
#include "dfhc/rng.hpp"

namespace dfhc::cnn {

CnnModel::CnnModel(InputDims input, std::vector<Layer> layers, std::uint64_t seed)
    : input_(input), layers_(std::move(layers)), seed_(seed) {
    if (layers_.empty() || !std::holds_alternative<Softmax>(layers_.back())) {
        throw PreconditionError("model must end with a softmax layer");
    }
    Shape shape{1, input_.channels, input_.height, input_.width};
    for (const auto& layer : layers_) shape = output_shape(layer, shape);
    num_classes_ = shape.per_sample();
}

std::size_t CnnModel::parameter_count() const noexcept {
    std::size_t n = 0;
    for (const auto& layer : layers_) n += cnn::parameter_count(layer);
    return n;
}

void CnnModel::initialize(std::uint64_t seed) {
    seed_ = seed;
    Rng rng(seed);
    for (auto& layer : layers_) {
        if (auto* conv = std::get_if<Conv2D>(&layer)) {
            const double fan_in = static_cast<double>(conv->in_channels * conv->kernel * conv->kernel);
            const double limit = std::sqrt(6.0 / fan_in);
            for (double& w : conv->weights) w = rng.uniform(-limit, limit);
            std::fill(conv->bias.begin(), conv->bias.end(), 0.0);
        } else if (auto* dense = std::get_if<Dense>(&layer)) {
            const double limit = std::sqrt(6.0 / static_cast<double>(dense->in_features));
            for (double& w : dense->weights) w = rng.uniform(-limit, limit);
            std::fill(dense->bias.begin(), dense->bias.end(), 0.0);
        }
    }
}

void CnnModel::check_input(const Tensor4& batch) const {
    const Shape& s = batch.shape();
    if (s.c != input_.channels || s.h != input_.height || s.w != input_.width) {
        throw PreconditionError("batch shape " + s.str() + " does not match model input (" +
                                std::to_string(input_.channels) + ", " +
                                std::to_string(input_.height) + ", " +
                                std::to_string(input_.width) + ")");
    }
}

Tensor4 CnnModel::forward(const Tensor4& batch) const {
    check_input(batch);
    Tensor4 x = batch;
    for (const auto& layer : layers_) x = cnn::forward(layer, x);
    return x;
}

std::vector<std::size_t> CnnModel::predict(const Tensor4& batch) const {
    const Tensor4 probs = forward(batch);
    std::vector<std::size_t> out(batch.shape().n);
    for (std::size_t n = 0; n < out.size(); ++n) {
        const auto p = probs.sample(n);
        std::size_t best = 0;
        for (std::size_t k = 1; k < p.size(); ++k) {
            if (p[k] > p[best]) best = k;
        }
        out[n] = best;
    }
    return out;
}

Gradients CnnModel::make_gradients() const {
    Gradients g;
    g.reserve(layers_.size());
    for (const auto& layer : layers_) g.push_back(make_grad(layer));
    return g;
}

double CnnModel::loss_and_gradients(const Tensor4& batch, std::span<const std::size_t> labels,
                                    Gradients& grads) const {
    check_input(batch);
    const std::size_t n = batch.shape().n;
    if (labels.size() != n) {
        throw PreconditionError("got " + std::to_string(labels.size()) + " labels for a batch of " +
                                std::to_string(n));
    }
    for (std::size_t label : labels) {
        if (label >= num_classes_) {
            throw PreconditionError("label " + std::to_string(label) + " out of range for " +
                                    std::to_string(num_classes_) + " classes");
        }
    }
    if (grads.size() != layers_.size()) grads = make_gradients();
    for (auto& g : grads) g.zero();

    std::vector<Tensor4> acts;
    acts.reserve(layers_.size() + 1);
    acts.push_back(batch);
    for (const auto& layer : layers_) acts.push_back(cnn::forward(layer, acts.back()));

    const Tensor4& probs = acts.back();
    double loss = 0.0;
    Tensor4 grad(probs.shape());
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = probs.sample(i);
        auto g = grad.sample(i);
        loss -= std::log(p[labels[i]]);
        for (std::size_t k = 0; k < p.size(); ++k) g[k] = p[k] * inv_n;
        g[labels[i]] -= inv_n;
    }
    loss *= inv_n;

    // grad now holds d(loss)/d(softmax input); walk the remaining layers back.
    for (std::size_t li = layers_.size() - 1; li-- > 0;) {
        grad = cnn::backward(layers_[li], acts[li], acts[li + 1], grad, grads[li]);
    }
    return loss;
}

namespace {

template <typename Span, typename Layers>
std::vector<Span> collect_blocks(Layers& layers) {
    std::vector<Span> blocks;
    for (auto& layer : layers) {
        if (auto* conv = std::get_if<Conv2D>(&layer)) {
            blocks.emplace_back(conv->weights);
            blocks.emplace_back(conv->bias);
        } else if (auto* dense = std::get_if<Dense>(&layer)) {
            blocks.emplace_back(dense->weights);
            blocks.emplace_back(dense->bias);
        }
    }
    return blocks;
}

}  // namespace

std::vector<std::span<double>> CnnModel::parameter_blocks() {
    return collect_blocks<std::span<double>>(layers_);
}

std::vector<std::span<const double>> CnnModel::parameter_blocks() const {
    return collect_blocks<std::span<const double>>(layers_);
}

bool operator==(const CnnModel& a, const CnnModel& b) {
    if (!(a.input_ == b.input_) || a.layers_.size() != b.layers_.size() ||
        a.num_classes_ != b.num_classes_) {
        return false;
    }
    for (std::size_t i = 0; i < a.layers_.size(); ++i) {
        if (a.layers_[i].index() != b.layers_[i].index()) return false;
    }
    const auto pa = a.parameter_blocks();
    const auto pb = b.parameter_blocks();
    for (std::size_t i = 0; i < pa.size(); ++i) {
        if (!std::equal(pa[i].begin(), pa[i].end(), pb[i].begin(), pb[i].end())) return false;
    }
    return true;
}

CnnModel build_model(std::size_t input_size, std::size_t in_channels, std::size_t num_classes,
                     std::uint64_t seed) {
    if (input_size != 32 && input_size != 64) {
        throw PreconditionError("input size must be 32 or 64, got " + std::to_string(input_size));
    }
    if (in_channels != 1 && in_channels != 3) {
        throw PreconditionError("input channels must be 1 or 3, got " + std::to_string(in_channels));
    }
    if (num_classes < 2) throw PreconditionError("need at least 2 classes");

    std::vector<Layer> layers;
    std::size_t channels = in_channels;
    std::size_t side = input_size;
    for (std::size_t filters : {8u, 16u, 32u, 64u}) {
        layers.emplace_back(Conv2D(channels, filters, 3));
        layers.emplace_back(ReLU{});
        layers.emplace_back(MaxPool2{});
        channels = filters;
        side /= 2;
    }
    layers.emplace_back(Dense(channels * side * side, num_classes));
    layers.emplace_back(Softmax{});

    CnnModel model({in_channels, input_size, input_size}, std::move(layers), seed);
    model.initialize(seed);
    return model;
}

double SgdMomentum::step(CnnModel& model, const Tensor4& batch, std::span<const std::size_t> labels) {
    const double loss = model.loss_and_gradients(batch, labels, grads_);
    if (!std::isfinite(loss)) {
        std::ostringstream msg;
        msg << "training diverged: loss " << loss << " on a batch of " << batch.shape().n
            << " (lr " << lr_ << ", momentum " << momentum_ << ")";
        throw DivergenceError(msg.str());
    }
    if (velocity_.size() != grads_.size()) velocity_ = model.make_gradients();

    std::size_t block = 0;
    auto params = model.parameter_blocks();
    for (std::size_t li = 0; li < grads_.size(); ++li) {
        for (int part = 0; part < 2; ++part) {
            auto& g = part == 0 ? grads_[li].weights : grads_[li].bias;
            auto& v = part == 0 ? velocity_[li].weights : velocity_[li].bias;
            if (g.empty()) continue;
            auto p = params[block++];
            for (std::size_t i = 0; i < g.size(); ++i) {
                if (!std::isfinite(g[i])) {
                    throw DivergenceError("training diverged: non-finite gradient in layer " +
                                          std::to_string(li));
                }
                v[i] = momentum_ * v[i] + g[i];
                p[i] -= lr_ * v[i];
            }
        }
    }
    return loss;
}

double backward_and_update(CnnModel& model, const Tensor4& batch, std::span<const std::size_t> labels,
                           double lr, double momentum) {
    SgdMomentum opt(lr, momentum);
    return opt.step(model, batch, labels);
}

}  // namespace dfhc::cnn
