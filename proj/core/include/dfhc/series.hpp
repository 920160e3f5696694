#pragma once

// Multi-cluster time series and the per-channel preprocessing that runs
// before any image geometry: min-max normalization, windowing, s-lag
// differencing and natural cubic-spline resampling.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace dfhc {

using Channel = std::vector<double>;

/// 1..3 correlated channels of one modality (e.g. x/y/z acceleration).
struct Cluster {
    std::vector<Channel> channels;

    std::size_t dim() const noexcept { return channels.size(); }
    std::size_t length() const noexcept { return channels.empty() ? 0 : channels.front().size(); }
};

/// One labeled window of raw sensor data; the unit of encoding.
struct SeriesSegment {
    std::vector<Cluster> clusters;
    std::string label;
    std::string source_id;

    std::size_t length() const noexcept { return clusters.empty() ? 0 : clusters.front().length(); }
    std::size_t cluster_count() const noexcept { return clusters.size(); }
    /// Total channel count r (sum of cluster dims).
    std::size_t channel_count() const noexcept;

    /// Throws PreconditionError on shape violations and DataError on
    /// non-finite samples.
    void validate() const;
};

/// A segment whose every sample lies in [0, 1].
class NormalizedSegment {
public:
    /// Wraps data that is already in the unit range (throws DataError otherwise).
    static NormalizedSegment from_unit_range(SeriesSegment segment);

    const SeriesSegment& segment() const noexcept { return seg_; }
    const std::vector<Cluster>& clusters() const noexcept { return seg_.clusters; }
    const std::string& label() const noexcept { return seg_.label; }
    const std::string& source_id() const noexcept { return seg_.source_id; }
    std::size_t length() const noexcept { return seg_.length(); }
    std::size_t cluster_count() const noexcept { return seg_.cluster_count(); }
    std::size_t channel_count() const noexcept { return seg_.channel_count(); }

private:
    explicit NormalizedSegment(SeriesSegment segment) : seg_(std::move(segment)) {}
    SeriesSegment seg_;

    friend NormalizedSegment normalize_min_max(const SeriesSegment& segment);
    friend NormalizedSegment resample_segment(const NormalizedSegment& segment, std::size_t target_len);
};

/// Lag used by step coding; must satisfy 1 <= step and leave >= 2 samples.
struct StepSpec {
    std::size_t step = 1;
};

/// (v - min) / (max - min); a constant channel maps to all zeros.
Channel normalize_channel(std::span<const double> values);

/// Independent per-channel min-max scaling of a whole segment.
NormalizedSegment normalize_min_max(const SeriesSegment& segment);

/// Cuts a stream into windows with stride window_len - overlap. The trailing
/// partial window is dropped; windows get source_id "<id>_w<index>".
std::vector<SeriesSegment> window_segments(const SeriesSegment& stream, std::size_t window_len,
                                           std::size_t overlap = 0);

/// X(t+s) - X(t) per channel, then re-normalized into [0, 1].
NormalizedSegment step_difference(const NormalizedSegment& segment, StepSpec spec);

/// Natural cubic spline through knots 0..L-1, evaluated at target_len
/// evenly spaced points spanning [0, L-1]. Requires L >= 4.
Channel resample_cubic(std::span<const double> channel, std::size_t target_len);

/// resample_cubic on every channel; spline overshoot is clamped to [0, 1].
NormalizedSegment resample_segment(const NormalizedSegment& segment, std::size_t target_len);

/// Applies fn to every channel, preserving cluster structure and metadata.
SeriesSegment map_channels(const SeriesSegment& segment,
                           const std::function<Channel(std::span<const double>)>& fn);

}  // namespace dfhc
