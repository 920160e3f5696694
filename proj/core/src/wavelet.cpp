#include "dfhc/wavelet.hpp"

#include <cmath>
#include <string>

#include "dfhc/error.hpp"

namespace dfhc {

namespace {

std::array<double, kDb3Taps> make_db3_lowpass() {
    const double r10 = std::sqrt(10.0);
    const double s = std::sqrt(5.0 + 2.0 * r10);
    const double k = std::sqrt(2.0) / 32.0;
    return {(1.0 + r10 + s) * k,           (5.0 + r10 + 3.0 * s) * k,
            (10.0 - 2.0 * r10 + 2.0 * s) * k, (10.0 - 2.0 * r10 - 2.0 * s) * k,
            (5.0 + r10 - 3.0 * s) * k,     (1.0 + r10 - s) * k};
}

std::array<double, kDb3Taps> make_db3_highpass() {
    const auto& h = db3_lowpass();
    std::array<double, kDb3Taps> g{};
    for (std::size_t n = 0; n < kDb3Taps; ++n) {
        g[n] = (n % 2 == 0 ? 1.0 : -1.0) * h[kDb3Taps - 1 - n];
    }
    return g;
}

}  // namespace

const std::array<double, kDb3Taps>& db3_lowpass() noexcept {
    static const auto h = make_db3_lowpass();
    return h;
}

const std::array<double, kDb3Taps>& db3_highpass() noexcept {
    static const auto g = make_db3_highpass();
    return g;
}

std::size_t WaveletCoeffs::signal_length() const noexcept {
    std::size_t n = approx.size();
    for (const auto& d : details) n += d.size();
    return n;
}

std::vector<double> WaveletCoeffs::flatten() const {
    std::vector<double> out(approx);
    for (const auto& d : details) out.insert(out.end(), d.begin(), d.end());
    return out;
}

std::pair<std::vector<double>, std::vector<double>> dwt_step(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 2 || n % 2 != 0) {
        throw PreconditionError("wavelet step needs an even length >= 2, got " + std::to_string(n));
    }
    const auto& h = db3_lowpass();
    const auto& g = db3_highpass();
    std::vector<double> a(n / 2, 0.0), d(n / 2, 0.0);
    for (std::size_t k = 0; k < n / 2; ++k) {
        double sa = 0.0, sd = 0.0;
        for (std::size_t t = 0; t < kDb3Taps; ++t) {
            const double v = x[(2 * k + t) % n];
            sa += h[t] * v;
            sd += g[t] * v;
        }
        a[k] = sa;
        d[k] = sd;
    }
    return {std::move(a), std::move(d)};
}

std::vector<double> idwt_step(std::span<const double> a, std::span<const double> d) {
    if (a.size() != d.size() || a.empty()) {
        throw PreconditionError("approximation and detail bands must be equal and non-empty");
    }
    const std::size_t n = 2 * a.size();
    const auto& h = db3_lowpass();
    const auto& g = db3_highpass();
    std::vector<double> x(n, 0.0);
    for (std::size_t k = 0; k < a.size(); ++k) {
        for (std::size_t t = 0; t < kDb3Taps; ++t) {
            x[(2 * k + t) % n] += a[k] * h[t] + d[k] * g[t];
        }
    }
    return x;
}

WaveletCoeffs dwt_decompose(std::span<const double> signal, std::size_t level) {
    if (level < 1) throw PreconditionError("wavelet level must be >= 1");
    const std::size_t n = signal.size();
    if (level >= 8 * sizeof(std::size_t) || n == 0 || n % (std::size_t{1} << level) != 0) {
        throw PreconditionError("length " + std::to_string(n) + " is not divisible by 2^" +
                                std::to_string(level));
    }
    WaveletCoeffs coeffs;
    coeffs.level = level;
    std::vector<double> current(signal.begin(), signal.end());
    std::vector<std::vector<double>> fine_to_coarse;
    for (std::size_t j = 0; j < level; ++j) {
        auto [a, d] = dwt_step(current);
        fine_to_coarse.push_back(std::move(d));
        current = std::move(a);
    }
    coeffs.approx = std::move(current);
    coeffs.details.assign(std::make_move_iterator(fine_to_coarse.rbegin()),
                          std::make_move_iterator(fine_to_coarse.rend()));
    return coeffs;
}

std::vector<double> dwt_reconstruct(const WaveletCoeffs& coeffs) {
    if (coeffs.details.size() != coeffs.level) {
        throw PreconditionError("wavelet coefficients carry " +
                                std::to_string(coeffs.details.size()) + " detail bands for level " +
                                std::to_string(coeffs.level));
    }
    std::vector<double> current = coeffs.approx;
    for (const auto& d : coeffs.details) current = idwt_step(current, d);
    return current;
}

std::size_t dyadic_length(std::size_t length, std::size_t level) noexcept {
    const std::size_t unit = std::size_t{1} << level;
    return length - length % unit;
}

std::vector<double> dwt2_coefficients(std::span<const double> plane, std::size_t width,
                                      std::size_t height) {
    if (plane.size() != width * height) {
        throw PreconditionError("plane size does not match " + std::to_string(width) + "x" +
                                std::to_string(height));
    }
    if (width < 2 || height < 2 || width % 2 != 0 || height % 2 != 0) {
        throw PreconditionError("2-D wavelet coding needs even sides, got " +
                                std::to_string(width) + "x" + std::to_string(height));
    }
    std::vector<double> tmp(plane.size());
    for (std::size_t y = 0; y < height; ++y) {
        auto [a, d] = dwt_step(plane.subspan(y * width, width));
        for (std::size_t x = 0; x < width / 2; ++x) {
            tmp[y * width + x] = a[x];
            tmp[y * width + width / 2 + x] = d[x];
        }
    }
    std::vector<double> out(plane.size());
    std::vector<double> column(height);
    for (std::size_t x = 0; x < width; ++x) {
        for (std::size_t y = 0; y < height; ++y) column[y] = tmp[y * width + x];
        auto [a, d] = dwt_step(column);
        for (std::size_t y = 0; y < height / 2; ++y) {
            out[y * width + x] = a[y];
            out[(height / 2 + y) * width + x] = d[y];
        }
    }
    return out;
}

ImageRaster dwt2_image(const ImageRaster& img) {
    const std::size_t w = img.width();
    const std::size_t h = img.height();
    ImageRaster out(w, h, img.channels());
    std::vector<double> band((w / 2) * (h / 2));
    for (std::size_t c = 0; c < img.channels(); ++c) {
        auto coeffs = dwt2_coefficients(img.plane(c), w, h);
        for (std::size_t by = 0; by < 2; ++by) {
            for (std::size_t bx = 0; bx < 2; ++bx) {
                const std::size_t x0 = bx * (w / 2);
                const std::size_t y0 = by * (h / 2);
                for (std::size_t y = 0; y < h / 2; ++y) {
                    for (std::size_t x = 0; x < w / 2; ++x) band[y * (w / 2) + x] = coeffs[(y0 + y) * w + x0 + x];
                }
                normalize_plane(band);
                for (std::size_t y = 0; y < h / 2; ++y) {
                    for (std::size_t x = 0; x < w / 2; ++x) coeffs[(y0 + y) * w + x0 + x] = band[y * (w / 2) + x];
                }
            }
        }
        out.set_plane(c, coeffs);
    }
    return out;
}

}  // namespace dfhc
