#include "dfhc/series.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dfhc/error.hpp"

namespace dfhc {

std::size_t SeriesSegment::channel_count() const noexcept {
    std::size_t r = 0;
    for (const auto& c : clusters) r += c.dim();
    return r;
}

void SeriesSegment::validate() const {
    if (clusters.empty()) {
        throw PreconditionError("segment '" + source_id + "' has no clusters");
    }
    const std::size_t len = length();
    if (len < 2) {
        throw PreconditionError("segment '" + source_id + "' channels need at least 2 samples");
    }
    for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
        const auto& cluster = clusters[ci];
        if (cluster.dim() < 1 || cluster.dim() > 3) {
            throw PreconditionError("segment '" + source_id + "' cluster " + std::to_string(ci) +
                                    " has " + std::to_string(cluster.dim()) +
                                    " channels (expected 1..3)");
        }
        for (std::size_t ch = 0; ch < cluster.channels.size(); ++ch) {
            const auto& values = cluster.channels[ch];
            if (values.size() != len) {
                throw PreconditionError("segment '" + source_id + "' cluster " +
                                        std::to_string(ci) + " channel " + std::to_string(ch) +
                                        " length " + std::to_string(values.size()) +
                                        " differs from " + std::to_string(len));
            }
            for (std::size_t t = 0; t < values.size(); ++t) {
                if (!std::isfinite(values[t])) {
                    throw DataError("segment '" + source_id + "' cluster " + std::to_string(ci) +
                                    " channel " + std::to_string(ch) +
                                    ": non-finite sample at index " + std::to_string(t));
                }
            }
        }
    }
}

NormalizedSegment NormalizedSegment::from_unit_range(SeriesSegment segment) {
    segment.validate();
    for (const auto& cluster : segment.clusters) {
        for (const auto& ch : cluster.channels) {
            for (double v : ch) {
                if (v < 0.0 || v > 1.0) {
                    throw DataError("segment '" + segment.source_id +
                                    "' has a value outside [0, 1]: " + std::to_string(v));
                }
            }
        }
    }
    return NormalizedSegment(std::move(segment));
}

Channel normalize_channel(std::span<const double> values) {
    Channel out(values.size(), 0.0);
    if (values.empty()) return out;
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double range = *hi_it - lo;
    if (!(range > 0.0)) return out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        out[i] = (values[i] - lo) / range;
    }
    return out;
}

SeriesSegment map_channels(const SeriesSegment& segment,
                           const std::function<Channel(std::span<const double>)>& fn) {
    SeriesSegment out;
    out.label = segment.label;
    out.source_id = segment.source_id;
    out.clusters.reserve(segment.clusters.size());
    for (const auto& cluster : segment.clusters) {
        Cluster mapped;
        mapped.channels.reserve(cluster.channels.size());
        for (const auto& ch : cluster.channels) mapped.channels.push_back(fn(ch));
        out.clusters.push_back(std::move(mapped));
    }
    return out;
}

NormalizedSegment normalize_min_max(const SeriesSegment& segment) {
    segment.validate();
    return NormalizedSegment(map_channels(segment, normalize_channel));
}

std::vector<SeriesSegment> window_segments(const SeriesSegment& stream, std::size_t window_len,
                                           std::size_t overlap) {
    const std::size_t len = stream.length();
    if (window_len == 0) throw PreconditionError("window length must be positive");
    if (overlap >= window_len) {
        throw PreconditionError("overlap " + std::to_string(overlap) +
                                " must be smaller than window length " +
                                std::to_string(window_len));
    }
    if (window_len > len) {
        throw PreconditionError("window length " + std::to_string(window_len) +
                                " exceeds stream length " + std::to_string(len) + " of '" +
                                stream.source_id + "'; no windows");
    }
    const std::size_t stride = window_len - overlap;
    std::vector<SeriesSegment> windows;
    for (std::size_t offset = 0, index = 0; offset + window_len <= len; offset += stride, ++index) {
        SeriesSegment w;
        w.label = stream.label;
        w.source_id = stream.source_id + "_w" + std::to_string(index);
        w.clusters.reserve(stream.clusters.size());
        for (const auto& cluster : stream.clusters) {
            Cluster wc;
            for (const auto& ch : cluster.channels) {
                const auto first = ch.begin() + static_cast<std::ptrdiff_t>(offset);
                wc.channels.emplace_back(first, first + static_cast<std::ptrdiff_t>(window_len));
            }
            w.clusters.push_back(std::move(wc));
        }
        windows.push_back(std::move(w));
    }
    return windows;
}

NormalizedSegment step_difference(const NormalizedSegment& segment, StepSpec spec) {
    const std::size_t len = segment.length();
    if (spec.step < 1 || spec.step >= len || len - spec.step < 2) {
        throw PreconditionError("step " + std::to_string(spec.step) +
                                " invalid for channel length " + std::to_string(len) +
                                " (need 1 <= s <= length - 2)");
    }
    const std::size_t s = spec.step;
    SeriesSegment diff = map_channels(segment.segment(), [s](std::span<const double> x) {
        Channel d(x.size() - s);
        for (std::size_t t = 0; t < d.size(); ++t) d[t] = x[t + s] - x[t];
        return d;
    });
    return normalize_min_max(diff);
}

Channel resample_cubic(std::span<const double> y, std::size_t target_len) {
    const std::size_t n = y.size();
    if (n < 4) {
        throw PreconditionError("cubic resampling needs at least 4 samples, got " +
                                std::to_string(n));
    }
    if (target_len < 2) {
        throw PreconditionError("resample target length must be >= 2, got " +
                                std::to_string(target_len));
    }

    // Second derivatives M with M[0] = M[n-1] = 0 on unit knot spacing:
    // M[i-1] + 4 M[i] + M[i+1] = 6 (y[i+1] - 2 y[i] + y[i-1]).
    std::vector<double> m(n, 0.0);
    const std::size_t inner = n - 2;
    std::vector<double> c_prime(inner), d_prime(inner);
    for (std::size_t k = 0; k < inner; ++k) {
        const std::size_t i = k + 1;
        const double rhs = 6.0 * (y[i + 1] - 2.0 * y[i] + y[i - 1]);
        if (k == 0) {
            c_prime[k] = 1.0 / 4.0;
            d_prime[k] = rhs / 4.0;
        } else {
            const double denom = 4.0 - c_prime[k - 1];
            c_prime[k] = 1.0 / denom;
            d_prime[k] = (rhs - d_prime[k - 1]) / denom;
        }
    }
    for (std::size_t k = inner; k-- > 0;) {
        m[k + 1] = d_prime[k] - (k + 1 < inner ? c_prime[k] * m[k + 2] : 0.0);
    }

    Channel out(target_len);
    const std::size_t span_len = n - 1;
    for (std::size_t j = 0; j < target_len; ++j) {
        const double x =
            static_cast<double>(j * span_len) / static_cast<double>(target_len - 1);
        std::size_t i = static_cast<std::size_t>(x);
        if (i >= n - 1) i = n - 2;
        const double t = x - static_cast<double>(i);
        const double u = 1.0 - t;
        out[j] = u * y[i] + t * y[i + 1] + ((u * u * u - u) * m[i] + (t * t * t - t) * m[i + 1]) / 6.0;
    }
    out.front() = y.front();
    out.back() = y.back();
    return out;
}

NormalizedSegment resample_segment(const NormalizedSegment& segment, std::size_t target_len) {
    if (segment.length() == target_len) return segment;
    return NormalizedSegment(map_channels(segment.segment(), [target_len](std::span<const double> x) {
        Channel r = resample_cubic(x, target_len);
        for (double& v : r) v = std::clamp(v, 0.0, 1.0);
        return r;
    }));
}

}  // namespace dfhc
