#pragma once

#include <random>
#include <vector>

#include "dfhc/image.hpp"
#include "dfhc/series.hpp"

namespace bench {

inline dfhc::ImageRaster noise_image(std::size_t side, std::size_t channels) {
    dfhc::ImageRaster img(side, side, channels);
    std::mt19937_64 gen(side);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    for (double& v : img.data()) v = d(gen);
    return img;
}

inline std::vector<double> noise(std::size_t n, std::uint64_t seed = 1) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = d(gen);
    return v;
}

// Two 3-axis clusters of noise.
inline dfhc::SeriesSegment two_clusters(std::size_t length) {
    dfhc::SeriesSegment s;
    s.source_id = "bench";
    s.clusters.resize(2);
    for (std::uint64_t c = 0; c < 6; ++c) s.clusters[c / 3].channels.push_back(noise(length, c + 1));
    return s;
}

}  // namespace bench
