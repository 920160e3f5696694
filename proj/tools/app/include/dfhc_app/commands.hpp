#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "dfhc_app/config.hpp"
#include "dfhc_app/dataset.hpp"

namespace dfhc::app {

/// One line of index.csv.
struct IndexRow {
    std::string path;  ///< relative to the index file
    std::string label;
    std::string source_id;
    std::string method;
    std::size_t size = 0;
    std::size_t channels = 0;
    std::size_t fold_width = 0;
    std::size_t l_eff = 0;
    bool split_eligible = true;  ///< false when the class has < 5 images
};

inline constexpr std::size_t kMinSamplesPerClass = 5;

void write_index(const std::filesystem::path& path, const std::vector<IndexRow>& rows);
std::vector<IndexRow> read_index(const std::filesystem::path& path);

/// Hash of the sorted (source_id, label) pairs: equal for two encodings of
/// the same segments regardless of method.
std::string dataset_fingerprint(const std::vector<IndexRow>& rows);

struct EncodeSummary {
    std::filesystem::path index_path;
    std::size_t encoded = 0;
    std::size_t failed = 0;
};

/// Encodes every segment of the manifest to out_dir/images/<id>_<method>.png
/// and writes out_dir/index.csv. Segments that fail are logged and skipped;
/// a DataError is thrown when none succeed.
EncodeSummary cmd_encode(const DatasetManifest& manifest, const RunConfig& config,
                         const std::filesystem::path& out_dir, std::ostream& log);

/// Split, train, evaluate. Writes report.json, summary.txt, confusion.csv
/// and model.json into out_dir and returns the report.
nlohmann::json cmd_train(const std::filesystem::path& index_path, const RunConfig& config,
                         const std::filesystem::path& out_dir, std::ostream& log);

struct CompareRow {
    std::string method;
    double test_accuracy = 0.0;
    std::size_t fold_width_min = 0;
    std::size_t fold_width_max = 0;
    std::size_t image_size = 0;
    std::size_t test_samples = 0;
    std::string run_dir;
};

/// Reads report.json from every run directory, checks they share one
/// dataset and returns rows sorted by accuracy (descending, then method).
std::vector<CompareRow> compare_runs(const std::vector<std::filesystem::path>& run_dirs, std::ostream& log);
std::string comparison_csv(const std::vector<CompareRow>& rows);
std::string comparison_text(const std::vector<CompareRow>& rows);

/// Writes a synthetic CSV dataset and its manifest; returns the manifest path.
std::filesystem::path cmd_synth(const SynthSpec& spec, const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace dfhc::app
