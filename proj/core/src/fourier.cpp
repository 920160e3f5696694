#include "dfhc/fourier.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "dfhc/error.hpp"

namespace dfhc {

namespace {

void fft_radix2(std::vector<Complex>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    std::vector<Complex> twiddle(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        twiddle[k] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) /
                                         static_cast<double>(n));
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        const std::size_t stride = n / len;
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const Complex u = a[start + k];
                const Complex v = a[start + k + half] * twiddle[k * stride];
                a[start + k] = u + v;
                a[start + k + half] = u - v;
            }
        }
    }
}

void inverse_radix2(std::vector<Complex>& a) {
    for (auto& v : a) v = std::conj(v);
    fft_radix2(a);
    const double scale = 1.0 / static_cast<double>(a.size());
    for (auto& v : a) v = std::conj(v) * scale;
}

void fft_bluestein(std::vector<Complex>& x) {
    const std::size_t n = x.size();
    const std::size_t m = std::bit_ceil(2 * n - 1);

    // exp(-i pi k^2 / n); k^2 is reduced mod 2n to keep the angle small.
    std::vector<Complex> chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t k2 = (k * k) % (2 * n);
        chirp[k] = std::polar(1.0, -std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n));
    }

    std::vector<Complex> a(m), b(m);
    for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
    b[0] = std::conj(chirp[0]);
    for (std::size_t k = 1; k < n; ++k) {
        b[k] = std::conj(chirp[k]);
        b[m - k] = std::conj(chirp[k]);
    }
    fft_radix2(a);
    fft_radix2(b);
    for (std::size_t i = 0; i < m; ++i) a[i] *= b[i];
    inverse_radix2(a);
    for (std::size_t k = 0; k < n; ++k) x[k] = a[k] * chirp[k];
}

}  // namespace

void fft_inplace(std::vector<Complex>& data) {
    const std::size_t n = data.size();
    if (n <= 1) return;
    if (std::has_single_bit(n)) {
        fft_radix2(data);
    } else {
        fft_bluestein(data);
    }
}

std::vector<Complex> dft(std::span<const double> signal) {
    std::vector<Complex> data(signal.begin(), signal.end());
    fft_inplace(data);
    return data;
}

std::vector<double> dft_magnitude_centered(std::span<const double> signal) {
    if (signal.size() < 2) {
        throw PreconditionError("DFT needs at least 2 samples, got " + std::to_string(signal.size()));
    }
    const auto spectrum = dft(signal);
    std::vector<double> mags(spectrum.size());
    for (std::size_t k = 0; k < spectrum.size(); ++k) mags[k] = std::abs(spectrum[k]);
    return center_shift<double>(mags);
}

std::vector<double> fft2_magnitude_centered(std::span<const double> plane, std::size_t width,
                                            std::size_t height) {
    if (plane.size() != width * height || width == 0 || height == 0) {
        throw PreconditionError("plane size does not match " + std::to_string(width) + "x" +
                                std::to_string(height));
    }
    std::vector<Complex> grid(plane.begin(), plane.end());
    std::vector<Complex> line(width);
    for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) line[x] = grid[y * width + x];
        fft_inplace(line);
        for (std::size_t x = 0; x < width; ++x) grid[y * width + x] = line[x];
    }
    line.resize(height);
    for (std::size_t x = 0; x < width; ++x) {
        for (std::size_t y = 0; y < height; ++y) line[y] = grid[y * width + x];
        fft_inplace(line);
        for (std::size_t y = 0; y < height; ++y) grid[y * width + x] = line[y];
    }
    std::vector<double> out(plane.size());
    for (std::size_t y = 0; y < height; ++y) {
        const std::size_t sy = (y + height / 2) % height;
        for (std::size_t x = 0; x < width; ++x) {
            const std::size_t sx = (x + width / 2) % width;
            out[sy * width + sx] = std::abs(grid[y * width + x]);
        }
    }
    return out;
}

ImageRaster fft2_magnitude_image(const ImageRaster& img) {
    if (img.width() != img.height()) {
        throw PreconditionError("2-D FFT coding expects a square image");
    }
    ImageRaster out(img.width(), img.height(), img.channels());
    for (std::size_t c = 0; c < img.channels(); ++c) {
        auto mags = fft2_magnitude_centered(img.plane(c), img.width(), img.height());
        for (double& m : mags) m = std::log1p(m);
        normalize_plane(mags);
        out.set_plane(c, mags);
    }
    return out;
}

}  // namespace dfhc
