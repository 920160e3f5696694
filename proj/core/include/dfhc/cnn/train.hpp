#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dfhc/cnn/model.hpp"
#include "dfhc/image.hpp"

namespace dfhc::cnn {

struct LabeledImage {
    ImageRaster image;
    std::size_t label = 0;
    std::string id;
};

/// Stratified 7:1:2 partition.
struct SplitDataset {
    std::vector<LabeledImage> train;
    std::vector<LabeledImage> val;
    std::vector<LabeledImage> test;
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;  ///< e.g. classes below 10 samples
};

struct SplitCounts {
    std::size_t train = 0;
    std::size_t val = 0;
    std::size_t test = 0;

    friend bool operator==(const SplitCounts&, const SplitCounts&) = default;
};

/// floor(0.7n) / floor(0.1n) / floor(0.2n); the remainder is handed out one
/// sample at a time to train, then val, then test.
SplitCounts split_counts(std::size_t n) noexcept;

/// Shuffles each class with a seeded generator and cuts it per split_counts.
/// Labels must be dense in [0, K); throws DataError if some class is empty.
SplitDataset split_7_1_2(std::vector<LabeledImage> samples, std::uint64_t seed);

/// Packs images into an NCHW batch. All images must share one geometry.
Tensor4 to_batch(std::span<const LabeledImage> samples);
Tensor4 to_batch(std::span<const LabeledImage> samples, std::span<const std::size_t> indices);

struct TrainOptions {
    std::size_t epochs = 10;
    std::size_t batch_size = 32;
    double lr = 0.01;
    double momentum = 0.9;
    std::uint64_t seed = 0;
};

struct EpochRecord {
    std::size_t epoch = 0;  ///< 1-based
    double train_loss = 0.0;
    std::optional<double> val_accuracy;  ///< empty when there is no validation set
};

struct TrainingReport {
    std::vector<EpochRecord> epochs;
    std::size_t best_epoch = 0;  ///< 0 when no epoch ran
    std::optional<double> best_val_accuracy;
};

/// Mini-batch SGD with momentum over splits.train, reshuffled every epoch
/// from options.seed. After each epoch the validation accuracy is measured
/// and the parameters of the best epoch (latest on ties) are restored at
/// the end. With no validation set the final parameters are kept.
TrainingReport train(CnnModel& model, const SplitDataset& splits, const TrainOptions& options);

struct Metrics {
    double accuracy = 0.0;
    std::size_t total = 0;
    /// confusion[true][predicted]
    std::vector<std::vector<std::size_t>> confusion;
};

Metrics metrics_from_predictions(std::span<const std::size_t> truth,
                                 std::span<const std::size_t> predicted, std::size_t num_classes);

Metrics evaluate(const CnnModel& model, std::span<const LabeledImage> samples);

}  // namespace dfhc::cnn
