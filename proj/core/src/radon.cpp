#include "dfhc/radon.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "dfhc/error.hpp"

namespace dfhc {

double Sinogram::rho_of_bin(std::size_t rho) const noexcept {
    return static_cast<double>(rho) - static_cast<double>(rho_bins - 1) / 2.0;
}

double Sinogram::theta_of_bin(std::size_t theta) const noexcept {
    return std::numbers::pi * static_cast<double>(theta) / static_cast<double>(theta_bins);
}

double Sinogram::projection_mass(std::size_t theta) const {
    double sum = 0.0;
    for (std::size_t r = 0; r < rho_bins; ++r) sum += at(r, theta);
    return sum;
}

std::size_t radon_rho_bins(std::size_t side) noexcept {
    if (side == 0) return 0;
    auto bins = static_cast<std::size_t>(std::ceil(std::numbers::sqrt2 * static_cast<double>(side - 1))) + 3;
    if (bins % 2 != side % 2) ++bins;
    return bins;
}

Sinogram radon_transform(std::span<const double> plane, std::size_t side, std::size_t theta_bins) {
    if (side == 0 || plane.size() != side * side) {
        throw PreconditionError("Radon transform expects a square plane");
    }
    if (theta_bins < 2) {
        throw PreconditionError("Radon transform needs >= 2 angles, got " + std::to_string(theta_bins));
    }
    Sinogram sino;
    sino.rho_bins = radon_rho_bins(side);
    sino.theta_bins = theta_bins;
    sino.data.assign(sino.rho_bins * theta_bins, 0.0);

    const double center = static_cast<double>(side - 1) / 2.0;
    const double rho_origin = static_cast<double>(sino.rho_bins - 1) / 2.0;
    for (std::size_t k = 0; k < theta_bins; ++k) {
        const double theta = sino.theta_of_bin(k);
        const double ct = std::cos(theta);
        const double st = std::sin(theta);
        for (std::size_t y = 0; y < side; ++y) {
            const double dy = static_cast<double>(y) - center;
            for (std::size_t x = 0; x < side; ++x) {
                const double v = plane[y * side + x];
                if (v == 0.0) continue;
                const double dx = static_cast<double>(x) - center;
                const double u = dx * ct + dy * st + rho_origin;
                const double base = std::floor(u);
                const double frac = u - base;
                const auto lo = static_cast<std::size_t>(base);
                sino.data[lo * theta_bins + k] += v * (1.0 - frac);
                if (frac > 0.0) sino.data[(lo + 1) * theta_bins + k] += v * frac;
            }
        }
    }
    return sino;
}

ImageRaster radon_image(const ImageRaster& img, std::size_t theta_bins, std::size_t target) {
    if (img.width() != img.height()) {
        throw PreconditionError("Radon coding expects a square image");
    }
    const std::size_t bins = radon_rho_bins(img.width());
    ImageRaster sino_img(theta_bins, bins, img.channels());
    for (std::size_t c = 0; c < img.channels(); ++c) {
        Sinogram sino = radon_transform(img.plane(c), img.width(), theta_bins);
        normalize_plane(sino.data);
        sino_img.set_plane(c, sino.data);
    }
    return resize_image(sino_img, target);
}

}  // namespace dfhc
