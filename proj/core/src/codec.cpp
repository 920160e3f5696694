#include "dfhc/codec.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "dfhc/error.hpp"
#include "dfhc/fourier.hpp"
#include "dfhc/radon.hpp"
#include "dfhc/wavelet.hpp"

namespace dfhc {

std::string_view method_name(CodingMethod method) noexcept {
    switch (method) {
        case CodingMethod::Gray: return "Gray";
        case CodingMethod::RGB: return "RGB";
        case CodingMethod::GrayStep: return "Gray-Step";
        case CodingMethod::RGBStep: return "RGB-Step";
        case CodingMethod::FFT_RGB: return "FFT-RGB";
        case CodingMethod::WT_RGB: return "WT-RGB";
        case CodingMethod::RGB_FFT: return "RGB-FFT";
        case CodingMethod::RGB_WT: return "RGB-WT";
        case CodingMethod::RGB_Radon: return "RGB-Radon";
    }
    return "?";
}

std::optional<CodingMethod> parse_method(std::string_view text) noexcept {
    auto canon = [](std::string_view s) {
        std::string out;
        for (char ch : s) {
            if (ch == '_' || ch == '-' || ch == ' ') continue;
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        }
        return out;
    };
    const std::string key = canon(text);
    for (CodingMethod m : kAllMethods) {
        if (canon(method_name(m)) == key) return m;
    }
    return std::nullopt;
}

bool is_gray(CodingMethod method) noexcept {
    return method == CodingMethod::Gray || method == CodingMethod::GrayStep;
}

void CodecSpec::validate() const {
    if (target_size < 8) {
        throw ConfigError("target_size must be >= 8, got " + std::to_string(target_size));
    }
    if ((method == CodingMethod::GrayStep || method == CodingMethod::RGBStep) && step.step < 1) {
        throw ConfigError("step coding needs step >= 1");
    }
    if (method == CodingMethod::WT_RGB && (wavelet_level < 1 || wavelet_level > 16)) {
        throw ConfigError("wavelet_level must be in 1..16, got " + std::to_string(wavelet_level));
    }
    if (method == CodingMethod::RGB_Radon && radon_angles < 2) {
        throw ConfigError("radon_angles must be >= 2, got " + std::to_string(radon_angles));
    }
}

EncodedImage fold_segment(const NormalizedSegment& segment, FoldMode mode) {
    const std::size_t rows =
        mode == FoldMode::RGB ? segment.cluster_count() : segment.channel_count();
    const FoldPlan plan = plan_fold(rows, segment.length(), mode);
    const NormalizedSegment fitted = resample_segment(segment, plan.effective_len);
    const ImageRaster strip =
        mode == FoldMode::RGB ? encode_rgb_strip(fitted, plan) : encode_gray_strip(fitted, plan);
    return {fold_strip(strip, plan), plan};
}

NormalizedSegment transform_series(const NormalizedSegment& segment, const CodecSpec& spec) {
    SeriesSegment transformed;
    if (spec.method == CodingMethod::FFT_RGB) {
        transformed = map_channels(segment.segment(), [](std::span<const double> x) {
            return dft_magnitude_centered(x);
        });
    } else if (spec.method == CodingMethod::WT_RGB) {
        const std::size_t level = spec.wavelet_level;
        const std::size_t len = dyadic_length(segment.length(), level);
        if (len == 0) {
            throw PreconditionError("segment length " + std::to_string(segment.length()) +
                                    " too short for wavelet level " + std::to_string(level));
        }
        const WaveletSeries mode = spec.wavelet_series;
        transformed = map_channels(segment.segment(), [level, len, mode](std::span<const double> x) {
            const Channel fitted = len == x.size() ? Channel(x.begin(), x.end()) : resample_cubic(x, len);
            WaveletCoeffs coeffs = dwt_decompose(fitted, level);
            if (mode == WaveletSeries::Coefficients) return coeffs.flatten();
            for (auto& d : coeffs.details) std::fill(d.begin(), d.end(), 0.0);
            return dwt_reconstruct(coeffs);
        });
    } else {
        throw PreconditionError("transform_series expects FFT-RGB or WT-RGB, got " +
                                std::string(method_name(spec.method)));
    }
    return normalize_min_max(transformed);
}

EncodedImage encode_tf_rgb(const NormalizedSegment& segment, const CodecSpec& spec) {
    spec.validate();
    EncodedImage folded = fold_segment(transform_series(segment, spec), FoldMode::RGB);
    folded.image = resize_image(folded.image, spec.target_size);
    return folded;
}

EncodedImage encode_rgb_tf(const NormalizedSegment& segment, const CodecSpec& spec) {
    spec.validate();
    EncodedImage folded = fold_segment(segment, FoldMode::RGB);
    switch (spec.method) {
        case CodingMethod::RGB_FFT:
            folded.image = resize_image(fft2_magnitude_image(folded.image), spec.target_size);
            break;
        case CodingMethod::RGB_WT: {
            ImageRaster base = std::move(folded.image);
            // The 2-D filter bank needs an even side.
            if (base.width() % 2 != 0) base = resize_image(base, base.width() - 1);
            folded.image = resize_image(dwt2_image(base), spec.target_size);
            break;
        }
        case CodingMethod::RGB_Radon:
            folded.image = radon_image(folded.image, spec.radon_angles, spec.target_size);
            break;
        default:
            throw PreconditionError("encode_rgb_tf expects RGB-FFT, RGB-WT or RGB-Radon, got " +
                                    std::string(method_name(spec.method)));
    }
    return folded;
}

EncodedImage encode_normalized(const NormalizedSegment& segment, const CodecSpec& spec) {
    spec.validate();
    switch (spec.method) {
        case CodingMethod::Gray:
        case CodingMethod::RGB:
        case CodingMethod::GrayStep:
        case CodingMethod::RGBStep: {
            const bool step = spec.method == CodingMethod::GrayStep || spec.method == CodingMethod::RGBStep;
            const FoldMode mode = is_gray(spec.method) ? FoldMode::Gray : FoldMode::RGB;
            EncodedImage folded =
                fold_segment(step ? step_difference(segment, spec.step) : segment, mode);
            folded.image = resize_image(folded.image, spec.target_size);
            return folded;
        }
        case CodingMethod::FFT_RGB:
        case CodingMethod::WT_RGB:
            return encode_tf_rgb(segment, spec);
        case CodingMethod::RGB_FFT:
        case CodingMethod::RGB_WT:
        case CodingMethod::RGB_Radon:
            return encode_rgb_tf(segment, spec);
    }
    throw PreconditionError("unknown coding method");
}

EncodedImage encode_segment(const SeriesSegment& segment, const CodecSpec& spec) {
    return encode_normalized(normalize_min_max(segment), spec);
}

}  // namespace dfhc
