#pragma once

// End-to-end codings from a segment to a square image of target_size:
//
//   Gray, RGB            normalize -> fold
//   Gray-Step, RGB-Step  normalize -> s-lag difference -> fold
//   FFT-RGB, WT-RGB      normalize -> 1-D transform per channel -> RGB fold
//   RGB-FFT, RGB-WT,     normalize -> RGB fold -> 2-D image transform
//   RGB-Radon
//
// Every coding finishes with a bilinear resize to target_size.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "dfhc/fold.hpp"
#include "dfhc/image.hpp"
#include "dfhc/series.hpp"

namespace dfhc {

enum class CodingMethod { Gray, RGB, GrayStep, RGBStep, FFT_RGB, WT_RGB, RGB_FFT, RGB_WT, RGB_Radon };

inline constexpr CodingMethod kAllMethods[] = {
    CodingMethod::Gray,   CodingMethod::RGB,    CodingMethod::GrayStep,
    CodingMethod::RGBStep, CodingMethod::FFT_RGB, CodingMethod::WT_RGB,
    CodingMethod::RGB_FFT, CodingMethod::RGB_WT,  CodingMethod::RGB_Radon};

/// Display name, e.g. "RGB-FFT". Also used in output file names.
std::string_view method_name(CodingMethod method) noexcept;

/// Accepts display names and underscore spellings, case-insensitive.
std::optional<CodingMethod> parse_method(std::string_view text) noexcept;

/// Which 1-D series WT-RGB images.
enum class WaveletSeries {
    Coefficients,   ///< [a_J, d_J, ..., d_1]
    Approximation,  ///< reconstruction with every detail band zeroed
};

struct CodecSpec {
    CodingMethod method = CodingMethod::RGB;
    StepSpec step{1};
    std::size_t wavelet_level = 3;
    WaveletSeries wavelet_series = WaveletSeries::Coefficients;
    std::size_t radon_angles = 180;
    std::size_t target_size = 64;

    /// Throws ConfigError for out-of-range parameters.
    void validate() const;
};

bool is_gray(CodingMethod method) noexcept;

struct EncodedImage {
    ImageRaster image;  ///< target_size x target_size, values in [0, 1]
    FoldPlan plan;      ///< geometry of the underlying fold
};

/// Plans the fold for the segment's current length, resamples every channel
/// to l_eff and returns the folded w x w image (no resize).
EncodedImage fold_segment(const NormalizedSegment& segment, FoldMode mode);

/// Transformed 1-D series used by FFT-RGB / WT-RGB, re-normalized.
NormalizedSegment transform_series(const NormalizedSegment& segment, const CodecSpec& spec);

/// FFT-RGB and WT-RGB.
EncodedImage encode_tf_rgb(const NormalizedSegment& segment, const CodecSpec& spec);

/// RGB-FFT, RGB-WT and RGB-Radon.
EncodedImage encode_rgb_tf(const NormalizedSegment& segment, const CodecSpec& spec);

/// Any method, starting from an already normalized segment.
EncodedImage encode_normalized(const NormalizedSegment& segment, const CodecSpec& spec);

/// Any method, starting from raw sensor values.
EncodedImage encode_segment(const SeriesSegment& segment, const CodecSpec& spec);

}  // namespace dfhc
