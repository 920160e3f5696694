#pragma once

// Square-fold geometry. A c-row (RGB) or r-row (Gray) pixel strip of
// length l_eff is cut into width-w blocks that are stacked vertically:
//
//   strip row k, sample t  ->  image row (t / w) * rows + k, column t % w
//
// which yields a w x w image exactly when l_eff * rows = w^2 and
// w mod rows = 0.

#include <cstddef>
#include <string_view>

#include "dfhc/image.hpp"
#include "dfhc/series.hpp"

namespace dfhc {

enum class FoldMode { RGB, Gray };

std::string_view to_string(FoldMode mode) noexcept;

struct FoldPlan {
    std::size_t width = 0;          ///< w, side of the square image
    std::size_t effective_len = 0;  ///< l_eff, samples kept per channel
    std::size_t strip_rows = 0;     ///< c for RGB, r for Gray
    std::size_t pixel_count = 0;    ///< w * w
    FoldMode mode = FoldMode::RGB;

    friend bool operator==(const FoldPlan&, const FoldPlan&) = default;
};

/// floor(sqrt(n)) computed exactly on integers.
std::size_t isqrt(std::size_t n) noexcept;

/// w = floor(sqrt(rows * l)), decremented until w mod rows = 0;
/// l_eff = w^2 / rows. Throws GeometryError when no w >= rows exists.
FoldPlan plan_fold(std::size_t strip_rows, std::size_t raw_len, FoldMode mode);

/// Cluster i becomes strip row i; its channels fill R, G, B in order and
/// missing channels stay zero. Channels must already have length l_eff.
ImageRaster encode_rgb_strip(const NormalizedSegment& segment, const FoldPlan& plan);

/// Every channel (clusters flattened in order) becomes one gray strip row.
ImageRaster encode_gray_strip(const NormalizedSegment& segment, const FoldPlan& plan);

/// strip (l_eff x rows) -> square (w x w).
ImageRaster fold_strip(const ImageRaster& strip, const FoldPlan& plan);

/// Exact inverse of fold_strip.
ImageRaster unfold_image(const ImageRaster& square, const FoldPlan& plan);

}  // namespace dfhc
