#pragma once

// Orthonormal db3 (Daubechies, 3 vanishing moments) filter bank with
// periodized boundaries: every level maps N samples to N/2 approximation
// plus N/2 detail coefficients, so the total count equals the input length
// and energy is preserved exactly.

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "dfhc/image.hpp"

namespace dfhc {

inline constexpr std::size_t kDb3Taps = 6;

/// Scaling (low-pass) filter h, normalized so sum h = sqrt(2), sum h^2 = 1.
const std::array<double, kDb3Taps>& db3_lowpass() noexcept;

/// Wavelet (high-pass) filter g[n] = (-1)^n h[5 - n].
const std::array<double, kDb3Taps>& db3_highpass() noexcept;

struct WaveletCoeffs {
    std::size_t level = 0;
    std::vector<double> approx;                ///< a_J
    std::vector<std::vector<double>> details;  ///< d_J, d_{J-1}, ..., d_1

    std::size_t signal_length() const noexcept;
    /// [a_J, d_J, ..., d_1] as one vector of signal_length() values.
    std::vector<double> flatten() const;
};

/// One analysis level: (approximation, detail), each of half the length.
std::pair<std::vector<double>, std::vector<double>> dwt_step(std::span<const double> signal);

/// One synthesis level, inverse of dwt_step.
std::vector<double> idwt_step(std::span<const double> approx, std::span<const double> detail);

/// Multilevel analysis. Length must be divisible by 2^level.
WaveletCoeffs dwt_decompose(std::span<const double> signal, std::size_t level);

std::vector<double> dwt_reconstruct(const WaveletCoeffs& coeffs);

/// Largest multiple of 2^level not exceeding length.
std::size_t dyadic_length(std::size_t length, std::size_t level) noexcept;

/// Single-level separable 2-D analysis (rows, then columns) of a
/// width x height plane, tiled as [LL | LH ; HL | HH] at the input size.
/// LH is row-high/column-low, HL is row-low/column-high.
std::vector<double> dwt2_coefficients(std::span<const double> plane, std::size_t width,
                                      std::size_t height);

/// dwt2_coefficients per channel with each of the four subbands min-max
/// normalized on its own. Side must be even.
ImageRaster dwt2_image(const ImageRaster& img);

}  // namespace dfhc
