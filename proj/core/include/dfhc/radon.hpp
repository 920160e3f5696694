#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dfhc/image.hpp"

namespace dfhc {

/// Parallel-beam projections R(rho, theta), theta = k * pi / theta_bins.
/// Row index is the rho bin (unit pixel pitch, rho = 0 at the middle bin),
/// column index is the angle.
struct Sinogram {
    std::size_t rho_bins = 0;
    std::size_t theta_bins = 0;
    std::vector<double> data;

    double at(std::size_t rho, std::size_t theta) const { return data[rho * theta_bins + theta]; }
    /// Signed offset (pixels) of a rho bin from the image center.
    double rho_of_bin(std::size_t rho) const noexcept;
    double theta_of_bin(std::size_t theta) const noexcept;
    /// Sum over rho of one angle's projection.
    double projection_mass(std::size_t theta) const;
};

/// Number of rho bins for a side x side image: covers the diagonal plus one
/// bin of margin each side, with the same parity as side so that the
/// theta = 0 projection lands exactly on pixel columns.
std::size_t radon_rho_bins(std::size_t side) noexcept;

/// Discrete Radon transform of a square row-major plane. Each pixel is
/// treated as a point mass at its center; for every angle the image is
/// rotated by bilinear splatting and the rotated columns are summed, which
/// reduces to sharing each pixel between the two rho bins adjacent to
/// x cos(theta) + y sin(theta). Mass per angle is conserved exactly.
Sinogram radon_transform(std::span<const double> plane, std::size_t side, std::size_t theta_bins);

/// Per channel sinogram, min-max normalized, resized to target x target.
ImageRaster radon_image(const ImageRaster& img, std::size_t theta_bins, std::size_t target);

}  // namespace dfhc
