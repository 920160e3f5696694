#include "dfhc/cnn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dfhc/error.hpp"

namespace dfhc::cnn {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

struct Range {
    std::size_t begin;
    std::size_t end;
};

// Output positions whose input position (pos + offset) falls inside [0, size).
Range valid_range(std::size_t size, std::ptrdiff_t offset) {
    const auto n = static_cast<std::ptrdiff_t>(size);
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -offset);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n, n - offset);
    if (hi <= lo) return {0, 0};
    return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

Tensor4 conv_forward(const Conv2D& conv, const Tensor4& in) {
    const Shape& s = in.shape();
    Tensor4 out({s.n, conv.out_channels, s.h, s.w});
    const std::size_t k = conv.kernel;
    const auto pad = static_cast<std::ptrdiff_t>(k / 2);
    const std::size_t plane = s.h * s.w;
    for (std::size_t n = 0; n < s.n; ++n) {
        for (std::size_t oc = 0; oc < conv.out_channels; ++oc) {
            double* dst = &out.at(n, oc, 0, 0);
            std::fill(dst, dst + plane, conv.bias[oc]);
            for (std::size_t ic = 0; ic < conv.in_channels; ++ic) {
                const double* src = &in.at(n, ic, 0, 0);
                const double* wk = &conv.weights[((oc * conv.in_channels) + ic) * k * k];
                for (std::size_t ky = 0; ky < k; ++ky) {
                    const std::ptrdiff_t dy = static_cast<std::ptrdiff_t>(ky) - pad;
                    const Range ry = valid_range(s.h, dy);
                    for (std::size_t kx = 0; kx < k; ++kx) {
                        const std::ptrdiff_t dx = static_cast<std::ptrdiff_t>(kx) - pad;
                        const Range rx = valid_range(s.w, dx);
                        const double wv = wk[ky * k + kx];
                        for (std::size_t y = ry.begin; y < ry.end; ++y) {
                            double* orow = dst + y * s.w;
                            const double* irow = src + static_cast<std::size_t>(static_cast<std::ptrdiff_t>(y) + dy) * s.w;
                            for (std::size_t x = rx.begin; x < rx.end; ++x) {
                                orow[x] += wv * irow[static_cast<std::ptrdiff_t>(x) + dx];
                            }
                        }
                    }
                }
            }
        }
    }
    return out;
}

Tensor4 conv_backward(const Conv2D& conv, const Tensor4& in, const Tensor4& grad_out, ParamGrad& grad) {
    const Shape& s = in.shape();
    Tensor4 grad_in(s);
    const std::size_t k = conv.kernel;
    const auto pad = static_cast<std::ptrdiff_t>(k / 2);
    const std::size_t plane = s.h * s.w;
    for (std::size_t n = 0; n < s.n; ++n) {
        for (std::size_t oc = 0; oc < conv.out_channels; ++oc) {
            const double* g = &grad_out.at(n, oc, 0, 0);
            double gsum = 0.0;
            for (std::size_t i = 0; i < plane; ++i) gsum += g[i];
            grad.bias[oc] += gsum;
            for (std::size_t ic = 0; ic < conv.in_channels; ++ic) {
                const double* src = &in.at(n, ic, 0, 0);
                double* gin = &grad_in.at(n, ic, 0, 0);
                const std::size_t wbase = ((oc * conv.in_channels) + ic) * k * k;
                for (std::size_t ky = 0; ky < k; ++ky) {
                    const std::ptrdiff_t dy = static_cast<std::ptrdiff_t>(ky) - pad;
                    const Range ry = valid_range(s.h, dy);
                    for (std::size_t kx = 0; kx < k; ++kx) {
                        const std::ptrdiff_t dx = static_cast<std::ptrdiff_t>(kx) - pad;
                        const Range rx = valid_range(s.w, dx);
                        const double wv = conv.weights[wbase + ky * k + kx];
                        double gw = 0.0;
                        for (std::size_t y = ry.begin; y < ry.end; ++y) {
                            const double* grow = g + y * s.w;
                            const std::size_t irow_off = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(y) + dy) * s.w;
                            const double* irow = src + irow_off;
                            double* girow = gin + irow_off;
                            for (std::size_t x = rx.begin; x < rx.end; ++x) {
                                const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(x) + dx;
                                gw += grow[x] * irow[ix];
                                girow[ix] += wv * grow[x];
                            }
                        }
                        grad.weights[wbase + ky * k + kx] += gw;
                    }
                }
            }
        }
    }
    return grad_in;
}

Tensor4 relu_forward(const Tensor4& in) {
    Tensor4 out(in.shape());
    auto src = in.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] > 0.0 ? src[i] : 0.0;
    return out;
}

Tensor4 relu_backward(const Tensor4& in, const Tensor4& grad_out) {
    Tensor4 grad_in(in.shape());
    auto src = in.data();
    auto g = grad_out.data();
    auto dst = grad_in.data();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] > 0.0 ? g[i] : 0.0;
    return grad_in;
}

Tensor4 pool_forward(const Tensor4& in) {
    const Shape& s = in.shape();
    Tensor4 out({s.n, s.c, s.h / 2, s.w / 2});
    for (std::size_t n = 0; n < s.n; ++n) {
        for (std::size_t c = 0; c < s.c; ++c) {
            for (std::size_t y = 0; y < s.h / 2; ++y) {
                for (std::size_t x = 0; x < s.w / 2; ++x) {
                    const double a = in.at(n, c, 2 * y, 2 * x);
                    const double b = in.at(n, c, 2 * y, 2 * x + 1);
                    const double d = in.at(n, c, 2 * y + 1, 2 * x);
                    const double e = in.at(n, c, 2 * y + 1, 2 * x + 1);
                    out.at(n, c, y, x) = std::max(std::max(a, b), std::max(d, e));
                }
            }
        }
    }
    return out;
}

// The gradient goes to the first maximal element of each window (row-major).
Tensor4 pool_backward(const Tensor4& in, const Tensor4& grad_out) {
    const Shape& s = in.shape();
    Tensor4 grad_in(s);
    for (std::size_t n = 0; n < s.n; ++n) {
        for (std::size_t c = 0; c < s.c; ++c) {
            for (std::size_t y = 0; y < s.h / 2; ++y) {
                for (std::size_t x = 0; x < s.w / 2; ++x) {
                    std::size_t by = 2 * y, bx = 2 * x;
                    double best = in.at(n, c, by, bx);
                    for (std::size_t dy = 0; dy < 2; ++dy) {
                        for (std::size_t dx = 0; dx < 2; ++dx) {
                            const double v = in.at(n, c, 2 * y + dy, 2 * x + dx);
                            if (v > best) {
                                best = v;
                                by = 2 * y + dy;
                                bx = 2 * x + dx;
                            }
                        }
                    }
                    grad_in.at(n, c, by, bx) += grad_out.at(n, c, y, x);
                }
            }
        }
    }
    return grad_in;
}

Tensor4 dense_forward(const Dense& dense, const Tensor4& in) {
    const std::size_t batch = in.shape().n;
    Tensor4 out({batch, dense.out_features, 1, 1});
    for (std::size_t n = 0; n < batch; ++n) {
        const auto x = in.sample(n);
        auto y = out.sample(n);
        for (std::size_t o = 0; o < dense.out_features; ++o) {
            const double* wrow = &dense.weights[o * dense.in_features];
            double acc = dense.bias[o];
            for (std::size_t i = 0; i < dense.in_features; ++i) acc += wrow[i] * x[i];
            y[o] = acc;
        }
    }
    return out;
}

Tensor4 dense_backward(const Dense& dense, const Tensor4& in, const Tensor4& grad_out, ParamGrad& grad) {
    const std::size_t batch = in.shape().n;
    Tensor4 grad_in(in.shape());
    for (std::size_t n = 0; n < batch; ++n) {
        const auto x = in.sample(n);
        const auto g = grad_out.sample(n);
        auto gx = grad_in.sample(n);
        for (std::size_t o = 0; o < dense.out_features; ++o) {
            const double go = g[o];
            grad.bias[o] += go;
            const double* wrow = &dense.weights[o * dense.in_features];
            double* gwrow = &grad.weights[o * dense.in_features];
            for (std::size_t i = 0; i < dense.in_features; ++i) {
                gwrow[i] += go * x[i];
                gx[i] += go * wrow[i];
            }
        }
    }
    return grad_in;
}

Tensor4 softmax_forward(const Tensor4& in) {
    Tensor4 out(in.shape());
    for (std::size_t n = 0; n < in.shape().n; ++n) {
        const auto x = in.sample(n);
        auto p = out.sample(n);
        const double peak = *std::max_element(x.begin(), x.end());
        double total = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            p[i] = std::exp(x[i] - peak);
            total += p[i];
        }
        for (double& v : p) v /= total;
    }
    return out;
}

Tensor4 softmax_backward(const Tensor4& out, const Tensor4& grad_out) {
    Tensor4 grad_in(out.shape());
    for (std::size_t n = 0; n < out.shape().n; ++n) {
        const auto p = out.sample(n);
        const auto g = grad_out.sample(n);
        auto gx = grad_in.sample(n);
        double dot = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) dot += g[i] * p[i];
        for (std::size_t i = 0; i < p.size(); ++i) gx[i] = p[i] * (g[i] - dot);
    }
    return grad_in;
}

}  // namespace

Conv2D::Conv2D(std::size_t in, std::size_t out, std::size_t k)
    : in_channels(in), out_channels(out), kernel(k), weights(out * in * k * k, 0.0), bias(out, 0.0) {
    if (k % 2 == 0) throw PreconditionError("convolution kernel must be odd for same padding");
}

Dense::Dense(std::size_t in, std::size_t out)
    : in_features(in), out_features(out), weights(out * in, 0.0), bias(out, 0.0) {}

void ParamGrad::zero() {
    std::fill(weights.begin(), weights.end(), 0.0);
    std::fill(bias.begin(), bias.end(), 0.0);
}

std::string_view layer_kind(const Layer& layer) noexcept {
    return std::visit(Overloaded{
                          [](const Conv2D&) { return std::string_view("conv"); },
                          [](const ReLU&) { return std::string_view("relu"); },
                          [](const MaxPool2&) { return std::string_view("maxpool"); },
                          [](const Dense&) { return std::string_view("dense"); },
                          [](const Softmax&) { return std::string_view("softmax"); },
                      },
                      layer);
}

Shape output_shape(const Layer& layer, const Shape& in) {
    return std::visit(
        Overloaded{
            [&](const Conv2D& conv) {
                if (in.c != conv.in_channels) {
                    throw PreconditionError("conv expects " + std::to_string(conv.in_channels) +
                                            " channels, got shape " + in.str());
                }
                return Shape{in.n, conv.out_channels, in.h, in.w};
            },
            [&](const ReLU&) { return in; },
            [&](const MaxPool2&) {
                if (in.h < 2 || in.w < 2) {
                    throw PreconditionError("max-pool input too small: " + in.str());
                }
                return Shape{in.n, in.c, in.h / 2, in.w / 2};
            },
            [&](const Dense& dense) {
                if (in.per_sample() != dense.in_features) {
                    throw PreconditionError("dense expects " + std::to_string(dense.in_features) +
                                            " features, got shape " + in.str());
                }
                return Shape{in.n, dense.out_features, 1, 1};
            },
            [&](const Softmax&) { return in; },
        },
        layer);
}

Tensor4 forward(const Layer& layer, const Tensor4& in) {
    output_shape(layer, in.shape());
    return std::visit(Overloaded{
                          [&](const Conv2D& conv) { return conv_forward(conv, in); },
                          [&](const ReLU&) { return relu_forward(in); },
                          [&](const MaxPool2&) { return pool_forward(in); },
                          [&](const Dense& dense) { return dense_forward(dense, in); },
                          [&](const Softmax&) { return softmax_forward(in); },
                      },
                      layer);
}

Tensor4 backward(const Layer& layer, const Tensor4& in, const Tensor4& out, const Tensor4& grad_out,
                 ParamGrad& grad) {
    if (grad_out.shape() != out.shape()) {
        throw PreconditionError("gradient shape " + grad_out.shape().str() +
                                " does not match layer output " + out.shape().str());
    }
    return std::visit(Overloaded{
                          [&](const Conv2D& conv) { return conv_backward(conv, in, grad_out, grad); },
                          [&](const ReLU&) { return relu_backward(in, grad_out); },
                          [&](const MaxPool2&) { return pool_backward(in, grad_out); },
                          [&](const Dense& dense) { return dense_backward(dense, in, grad_out, grad); },
                          [&](const Softmax&) { return softmax_backward(out, grad_out); },
                      },
                      layer);
}

ParamGrad make_grad(const Layer& layer) {
    ParamGrad g;
    if (const auto* conv = std::get_if<Conv2D>(&layer)) {
        g.weights.assign(conv->weights.size(), 0.0);
        g.bias.assign(conv->bias.size(), 0.0);
    } else if (const auto* dense = std::get_if<Dense>(&layer)) {
        g.weights.assign(dense->weights.size(), 0.0);
        g.bias.assign(dense->bias.size(), 0.0);
    }
    return g;
}

std::size_t parameter_count(const Layer& layer) noexcept {
    if (const auto* conv = std::get_if<Conv2D>(&layer)) return conv->weights.size() + conv->bias.size();
    if (const auto* dense = std::get_if<Dense>(&layer)) return dense->weights.size() + dense->bias.size();
    return 0;
}

}  // namespace dfhc::cnn
