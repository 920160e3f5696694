#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "dfhc/image.hpp"

namespace dfhc {

using Complex = std::complex<double>;

/// Forward DFT F(u) = sum_t x(t) exp(-2 pi i u t / T), in place, any T >= 1.
/// Radix-2 for powers of two, Bluestein's chirp-z otherwise.
void fft_inplace(std::vector<Complex>& data);

std::vector<Complex> dft(std::span<const double> signal);

/// Rotates so that bin floor(T/2) holds index 0 (numpy-style fftshift).
template <typename T>
std::vector<T> center_shift(std::span<const T> values) {
    const std::size_t n = values.size();
    std::vector<T> out(n);
    for (std::size_t k = 0; k < n; ++k) out[(k + n / 2) % n] = values[k];
    return out;
}

/// |DFT| with zero frequency moved to bin floor(T/2). Requires T >= 2.
std::vector<double> dft_magnitude_centered(std::span<const double> signal);

/// 2-D |DFT| of a row-major width x height plane, zero frequency at
/// (floor(width/2), floor(height/2)).
std::vector<double> fft2_magnitude_centered(std::span<const double> plane, std::size_t width,
                                            std::size_t height);

/// Per channel: centered 2-D magnitude, log(1 + m), min-max into [0, 1].
ImageRaster fft2_magnitude_image(const ImageRaster& img);

}  // namespace dfhc
