#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dfhc/image.hpp"
#include "dfhc/series.hpp"

namespace dfhc::fixtures {

inline std::vector<double> random_values(std::mt19937_64& gen, std::size_t n, double lo = 0.0,
                                         double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(n);
    for (double& x : v) x = dist(gen);
    return v;
}

inline SeriesSegment random_segment(std::mt19937_64& gen, const std::vector<std::size_t>& dims,
                                    std::size_t length, const std::string& id = "seg") {
    SeriesSegment s;
    s.label = "x";
    s.source_id = id;
    for (std::size_t q : dims) {
        Cluster c;
        for (std::size_t i = 0; i < q; ++i) c.channels.push_back(random_values(gen, length, -3.0, 5.0));
        s.clusters.push_back(std::move(c));
    }
    return s;
}

inline ImageRaster random_raster(std::mt19937_64& gen, std::size_t w, std::size_t h, std::size_t ch) {
    ImageRaster img(w, h, ch);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (double& v : img.data()) v = dist(gen);
    return img;
}

}  // namespace dfhc::fixtures
