#include "dfhc/fold.hpp"

#include <cmath>
#include <string>

#include "dfhc/error.hpp"

namespace dfhc {

std::string_view to_string(FoldMode mode) noexcept {
    return mode == FoldMode::RGB ? "RGB" : "Gray";
}

std::size_t isqrt(std::size_t n) noexcept {
    auto r = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

FoldPlan plan_fold(std::size_t strip_rows, std::size_t raw_len, FoldMode mode) {
    if (strip_rows == 0) throw GeometryError("fold needs at least one strip row");
    if (raw_len < strip_rows) {
        throw GeometryError("length " + std::to_string(raw_len) + " is shorter than the " +
                            std::to_string(strip_rows) + " strip rows");
    }
    std::size_t w = isqrt(strip_rows * raw_len);
    while (w >= strip_rows && w % strip_rows != 0) --w;
    if (w < strip_rows) {
        throw GeometryError("no fold width >= " + std::to_string(strip_rows) + " for length " +
                            std::to_string(raw_len));
    }
    FoldPlan plan;
    plan.width = w;
    plan.strip_rows = strip_rows;
    plan.pixel_count = w * w;
    plan.effective_len = plan.pixel_count / strip_rows;
    plan.mode = mode;
    return plan;
}

namespace {

void require_length(const NormalizedSegment& segment, const FoldPlan& plan) {
    if (segment.length() != plan.effective_len) {
        throw GeometryError("channel length " + std::to_string(segment.length()) +
                            " differs from fold length " + std::to_string(plan.effective_len));
    }
}

void require_strip(const ImageRaster& strip, const FoldPlan& plan) {
    if (strip.width() != plan.effective_len || strip.height() != plan.strip_rows ||
        plan.effective_len * plan.strip_rows != plan.width * plan.width ||
        plan.width % plan.strip_rows != 0) {
        throw GeometryError("strip " + std::to_string(strip.width()) + "x" +
                            std::to_string(strip.height()) + " does not match fold plan w=" +
                            std::to_string(plan.width) + " l_eff=" +
                            std::to_string(plan.effective_len));
    }
}

}  // namespace

ImageRaster encode_rgb_strip(const NormalizedSegment& segment, const FoldPlan& plan) {
    if (plan.mode != FoldMode::RGB || plan.strip_rows != segment.cluster_count()) {
        throw GeometryError("RGB strip needs a RGB plan with one row per cluster (" +
                            std::to_string(segment.cluster_count()) + ")");
    }
    require_length(segment, plan);
    ImageRaster strip(plan.effective_len, plan.strip_rows, 3);
    for (std::size_t row = 0; row < segment.cluster_count(); ++row) {
        const auto& cluster = segment.clusters()[row];
        for (std::size_t c = 0; c < cluster.dim(); ++c) {
            const auto& values = cluster.channels[c];
            for (std::size_t t = 0; t < values.size(); ++t) strip.at(t, row, c) = values[t];
        }
    }
    return strip;
}

ImageRaster encode_gray_strip(const NormalizedSegment& segment, const FoldPlan& plan) {
    if (plan.mode != FoldMode::Gray || plan.strip_rows != segment.channel_count()) {
        throw GeometryError("Gray strip needs a Gray plan with one row per channel (" +
                            std::to_string(segment.channel_count()) + ")");
    }
    require_length(segment, plan);
    ImageRaster strip(plan.effective_len, plan.strip_rows, 1);
    std::size_t row = 0;
    for (const auto& cluster : segment.clusters()) {
        for (const auto& values : cluster.channels) {
            for (std::size_t t = 0; t < values.size(); ++t) strip.at(t, row) = values[t];
            ++row;
        }
    }
    return strip;
}

ImageRaster fold_strip(const ImageRaster& strip, const FoldPlan& plan) {
    require_strip(strip, plan);
    const std::size_t w = plan.width;
    const std::size_t rows = plan.strip_rows;
    const std::size_t ch = strip.channels();
    ImageRaster square(w, w, ch);
    for (std::size_t t = 0; t < plan.effective_len; ++t) {
        const std::size_t block = t / w;
        const std::size_t x = t % w;
        for (std::size_t k = 0; k < rows; ++k) {
            for (std::size_t c = 0; c < ch; ++c) square.at(x, block * rows + k, c) = strip.at(t, k, c);
        }
    }
    return square;
}

ImageRaster unfold_image(const ImageRaster& square, const FoldPlan& plan) {
    if (square.width() != plan.width || square.height() != plan.width) {
        throw GeometryError("image " + std::to_string(square.width()) + "x" +
                            std::to_string(square.height()) + " is not the planned " +
                            std::to_string(plan.width) + "x" + std::to_string(plan.width));
    }
    ImageRaster strip(plan.effective_len, plan.strip_rows, square.channels());
    require_strip(strip, plan);
    const std::size_t w = plan.width;
    const std::size_t rows = plan.strip_rows;
    for (std::size_t t = 0; t < plan.effective_len; ++t) {
        const std::size_t block = t / w;
        const std::size_t x = t % w;
        for (std::size_t k = 0; k < rows; ++k) {
            for (std::size_t c = 0; c < square.channels(); ++c) strip.at(t, k, c) = square.at(x, block * rows + k, c);
        }
    }
    return strip;
}

}  // namespace dfhc
