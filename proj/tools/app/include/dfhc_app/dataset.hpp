#pragma once

// Getting segments into the pipeline: CSV datasets described by a JSON
// manifest, and seeded synthetic data.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dfhc/series.hpp"

namespace dfhc::app {

/// One cluster of the schema: a name and its 1..3 CSV columns (x, y, z order).
struct ClusterColumns {
    std::string name;
    std::vector<std::string> columns;
};

enum class Grouping { Stream, PerFile };

/// A CSV file, or every *.csv directly inside a directory, with an optional
/// fixed label. Without one, labels come from label_column.
struct FileEntry {
    std::filesystem::path path;
    bool is_dir = false;
    std::optional<std::string> label;
};

struct DatasetManifest {
    std::filesystem::path root;
    std::vector<FileEntry> files;
    std::vector<ClusterColumns> schema;
    std::optional<std::string> label_column;
    Grouping grouping = Grouping::Stream;
    std::optional<std::size_t> window_len;  ///< required for Stream
    std::size_t overlap = 0;
    std::optional<double> sampling_rate;  ///< Hz, carried as metadata only

    /// Throws ConfigError on missing or inconsistent fields.
    void validate() const;
};

/// Relative paths in the manifest (root, files) resolve against base_dir.
DatasetManifest manifest_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
DatasetManifest load_manifest(const std::filesystem::path& path);
nlohmann::json manifest_to_json(const DatasetManifest& manifest);

struct LoadedDataset {
    std::vector<SeriesSegment> segments;
    std::vector<std::string> warnings;
};

/// Reads every file of the manifest, maps columns to clusters and groups
/// rows into segments (windowed streams or whole files). Errors name the
/// file, row and column at fault.
LoadedDataset load_csv_dataset(const DatasetManifest& manifest);

/// One class of the synthetic generator.
struct SynthClass {
    std::string name;
    double frequency = 1.0;  ///< cycles per segment
    double amplitude = 1.0;
};

struct SynthSpec {
    std::vector<SynthClass> classes;
    std::vector<std::size_t> cluster_dims{3};
    std::size_t length = 512;
    std::size_t samples_per_class = 100;
    double noise_sigma = 0.05;
    std::uint64_t seed = 0;

    /// Throws ConfigError (e.g. two classes with the same recipe).
    void validate() const;
};

SynthSpec synth_spec_from_json(const nlohmann::json& doc);
nlohmann::json synth_spec_to_json(const SynthSpec& spec);

/// Class k, sample i, channel j:
///   A_k sin(2 pi f_k t / L + phi_i + 2 pi j / r) + N(0, sigma^2)
/// with phi_i uniform in [0, 2 pi) per sample and r the channel count.
std::vector<SeriesSegment> generate_synthetic(const SynthSpec& spec);

/// Writes one CSV per segment plus a per_file manifest.json that
/// load_manifest accepts. Returns the manifest path.
std::filesystem::path write_synthetic_dataset(const SynthSpec& spec, const std::filesystem::path& out_dir);

/// Column name used for cluster c, channel j in generated CSV files.
std::string synth_column_name(std::size_t cluster, std::size_t channel);

}  // namespace dfhc::app
