#include "dfhc/cnn/train.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "dfhc/error.hpp"
#include "dfhc/rng.hpp"

namespace dfhc::cnn {

SplitCounts split_counts(std::size_t n) noexcept {
    SplitCounts c{7 * n / 10, n / 10, 2 * n / 10};
    std::size_t remainder = n - c.train - c.val - c.test;
    for (std::size_t turn = 0; remainder > 0; ++turn, --remainder) {
        switch (turn % 3) {
            case 0: ++c.train; break;
            case 1: ++c.val; break;
            default: ++c.test; break;
        }
    }
    return c;
}

SplitDataset split_7_1_2(std::vector<LabeledImage> samples, std::uint64_t seed) {
    if (samples.empty()) throw DataError("cannot split an empty dataset");
    std::size_t num_classes = 0;
    for (const auto& s : samples) num_classes = std::max(num_classes, s.label + 1);
    std::vector<std::vector<std::size_t>> by_class(num_classes);
    for (std::size_t i = 0; i < samples.size(); ++i) by_class[samples[i].label].push_back(i);

    SplitDataset out;
    out.seed = seed;
    Rng rng(seed);
    for (std::size_t k = 0; k < num_classes; ++k) {
        auto& members = by_class[k];
        if (members.empty()) {
            throw DataError("class " + std::to_string(k) + " has no samples");
        }
        if (members.size() < 10) {
            out.warnings.push_back("class " + std::to_string(k) + " has only " +
                                   std::to_string(members.size()) +
                                   " samples; the 7:1:2 split will be coarse");
        }
        rng.shuffle(std::span<std::size_t>(members));
        const SplitCounts counts = split_counts(members.size());
        for (std::size_t j = 0; j < members.size(); ++j) {
            auto& dest = j < counts.train ? out.train
                         : j < counts.train + counts.val ? out.val
                                                         : out.test;
            dest.push_back(std::move(samples[members[j]]));
        }
    }
    return out;
}

Tensor4 to_batch(std::span<const LabeledImage> samples, std::span<const std::size_t> indices) {
    if (indices.empty()) throw PreconditionError("empty batch");
    const ImageRaster& first = samples[indices.front()].image;
    const std::size_t w = first.width(), h = first.height(), c = first.channels();
    Tensor4 batch({indices.size(), c, h, w});
    for (std::size_t n = 0; n < indices.size(); ++n) {
        const ImageRaster& img = samples[indices[n]].image;
        if (img.width() != w || img.height() != h || img.channels() != c) {
            throw PreconditionError("image '" + samples[indices[n]].id +
                                    "' geometry differs from the rest of the batch");
        }
        for (std::size_t ch = 0; ch < c; ++ch) {
            for (std::size_t y = 0; y < h; ++y) {
                for (std::size_t x = 0; x < w; ++x) batch.at(n, ch, y, x) = img.at(x, y, ch);
            }
        }
    }
    return batch;
}

Tensor4 to_batch(std::span<const LabeledImage> samples) {
    std::vector<std::size_t> all(samples.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return to_batch(samples, all);
}

Metrics metrics_from_predictions(std::span<const std::size_t> truth,
                                 std::span<const std::size_t> predicted, std::size_t num_classes) {
    if (truth.size() != predicted.size()) {
        throw PreconditionError("prediction count does not match label count");
    }
    Metrics m;
    m.total = truth.size();
    m.confusion.assign(num_classes, std::vector<std::size_t>(num_classes, 0));
    std::size_t correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] >= num_classes || predicted[i] >= num_classes) {
            throw PreconditionError("class index out of range in metrics");
        }
        ++m.confusion[truth[i]][predicted[i]];
        if (truth[i] == predicted[i]) ++correct;
    }
    m.accuracy = m.total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(m.total);
    return m;
}

namespace {

constexpr std::size_t kEvalChunk = 64;

std::vector<std::size_t> predict_all(const CnnModel& model, std::span<const LabeledImage> samples) {
    std::vector<std::size_t> predicted;
    predicted.reserve(samples.size());
    std::vector<std::size_t> idx;
    for (std::size_t start = 0; start < samples.size(); start += kEvalChunk) {
        const std::size_t end = std::min(samples.size(), start + kEvalChunk);
        idx.resize(end - start);
        std::iota(idx.begin(), idx.end(), start);
        const auto p = model.predict(to_batch(samples, idx));
        predicted.insert(predicted.end(), p.begin(), p.end());
    }
    return predicted;
}

}  // namespace

Metrics evaluate(const CnnModel& model, std::span<const LabeledImage> samples) {
    if (samples.empty()) throw PreconditionError("cannot evaluate on an empty set");
    std::vector<std::size_t> truth(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) truth[i] = samples[i].label;
    return metrics_from_predictions(truth, predict_all(model, samples), model.num_classes());
}

TrainingReport train(CnnModel& model, const SplitDataset& splits, const TrainOptions& options) {
    TrainingReport report;
    if (options.epochs == 0) return report;
    if (splits.train.empty()) throw PreconditionError("training split is empty");
    if (options.batch_size == 0) throw PreconditionError("batch size must be positive");

    Rng rng(options.seed);
    SgdMomentum optimizer(options.lr, options.momentum);
    std::vector<std::size_t> order(splits.train.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<std::size_t> labels;
    CnnModel best = model;

    for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
        rng.shuffle(std::span<std::size_t>(order));
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
            const std::size_t end = std::min(order.size(), start + options.batch_size);
            const std::span<const std::size_t> idx(order.data() + start, end - start);
            labels.resize(idx.size());
            for (std::size_t i = 0; i < idx.size(); ++i) labels[i] = splits.train[idx[i]].label;
            const double loss = optimizer.step(model, to_batch(splits.train, idx), labels);
            loss_sum += loss * static_cast<double>(idx.size());
        }
        EpochRecord record;
        record.epoch = epoch;
        record.train_loss = loss_sum / static_cast<double>(order.size());
        if (!splits.val.empty()) {
            record.val_accuracy = evaluate(model, splits.val).accuracy;
            if (!report.best_val_accuracy || *record.val_accuracy >= *report.best_val_accuracy) {
                report.best_val_accuracy = record.val_accuracy;
                report.best_epoch = epoch;
                best = model;
            }
        } else {
            report.best_epoch = epoch;
        }
        report.epochs.push_back(record);
    }
    if (report.best_val_accuracy) model = std::move(best);
    return report;
}

}  // namespace dfhc::cnn
