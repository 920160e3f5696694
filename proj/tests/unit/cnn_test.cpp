#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numeric>
#include <random>
#include <set>

#include "dfhc/cnn/checkpoint.hpp"
#include "dfhc/cnn/model.hpp"
#include "dfhc/cnn/train.hpp"
#include "dfhc/error.hpp"
#include "gradcheck.hpp"

using namespace dfhc;
using namespace dfhc::cnn;

namespace {

CnnModel toy_model(std::uint64_t seed) {
    // 8x8x2 input -> conv/relu/pool twice -> 2x2x2 -> dense(3) -> softmax
    std::vector<Layer> layers{Conv2D(2, 3), ReLU{}, MaxPool2{}, Conv2D(3, 2), ReLU{}, MaxPool2{},
                              Dense(8, 3), Softmax{}};
    CnnModel model({2, 8, 8}, std::move(layers));
    model.initialize(seed);
    return model;
}

Tensor4 random_tensor(Shape shape, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    Tensor4 t(shape);
    for (double& v : t.data()) v = dist(gen);
    return t;
}

std::vector<LabeledImage> left_right_dataset(std::size_t per_class, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> noise(0.0, 0.2);
    std::vector<LabeledImage> out;
    for (std::size_t k = 0; k < 2; ++k) {
        for (std::size_t i = 0; i < per_class; ++i) {
            ImageRaster img(32, 32, 1);
            for (std::size_t y = 0; y < 32; ++y) {
                for (std::size_t x = 0; x < 32; ++x) {
                    const bool bright = (k == 0) ? x < 16 : x >= 16;
                    img.at(x, y) = (bright ? 0.8 : 0.0) + noise(gen);
                }
            }
            out.push_back({img, k, "lr" + std::to_string(k) + "_" + std::to_string(i)});
        }
    }
    return out;
}

std::vector<double> flat_params(const CnnModel& m) {
    std::vector<double> out;
    for (auto block : m.parameter_blocks()) out.insert(out.end(), block.begin(), block.end());
    return out;
}

}  // namespace

TEST(Conv2D, SameShape) {
    for (std::size_t k : {1u, 3u, 5u}) {
        const Layer conv = Conv2D(2, 4, k);
        EXPECT_EQ(output_shape(conv, {3, 2, 7, 5}), (Shape{3, 4, 7, 5}));
    }
    EXPECT_THROW(Conv2D(1, 1, 2), PreconditionError);
}

TEST(Conv2D, HandTracedLaplacian) {
    Conv2D conv(1, 1, 3);
    conv.weights = {0, 1, 0, 1, -4, 1, 0, 1, 0};
    conv.bias = {0.5};
    Tensor4 in({1, 1, 4, 4});
    for (std::size_t i = 0; i < 16; ++i) in.data()[i] = static_cast<double>(i + 1);
    const Tensor4 out = forward(conv, in);
    const std::vector<double> expected{3.5,  2.5, 1.5, -4.5, -3.5,  0.5,   0.5,   -8.5,
                                       -7.5, 0.5, 0.5, -12.5, -28.5, -17.5, -18.5, -36.5};
    for (std::size_t i = 0; i < 16; ++i) EXPECT_EQ(out.data()[i], expected[i]) << i;
}

TEST(Conv2D, KernelOrientationIsCorrelation) {
    Conv2D conv(1, 1, 3);
    conv.weights.assign(9, 0.0);
    conv.weights[0] = 1.0;  // ky = 0, kx = 0: the up-left neighbour
    conv.bias = {0.0};
    Tensor4 in({1, 1, 4, 4});
    for (std::size_t i = 0; i < 16; ++i) in.data()[i] = static_cast<double>(i + 1);
    const Tensor4 out = forward(conv, in);
    for (std::size_t y = 0; y < 4; ++y) {
        for (std::size_t x = 0; x < 4; ++x) {
            const double expected = (y == 0 || x == 0) ? 0.0 : in.at(0, 0, y - 1, x - 1);
            EXPECT_EQ(out.at(0, 0, y, x), expected);
        }
    }
}

template <typename L>
L randomized(L layer, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> d(-0.5, 0.5);
    for (double& w : layer.weights) w = d(gen);
    for (double& b : layer.bias) b = d(gen);
    return layer;
}

void expect_passes(const fixtures::GradCheck& r) {
    EXPECT_LT(r.max_rel_error, 1e-4);
    EXPECT_GE(2 * r.nonzero, r.checked) << "gradient check mostly compared zeros";
}

TEST(GradCheck, Conv) {
    expect_passes(fixtures::check_layer(randomized(Conv2D(2, 3), 1), random_tensor({2, 2, 6, 6}, 2), 3));
    expect_passes(fixtures::check_layer(randomized(Conv2D(2, 2, 5), 4), random_tensor({1, 2, 5, 7}, 5), 6));
}

TEST(GradCheck, ReLU) {
    expect_passes(fixtures::check_layer(ReLU{}, fixtures::separated_tensor({2, 3, 5, 5}, 7), 8));
}

TEST(GradCheck, MaxPool) {
    // Only a quarter of the inputs are window maxima.
    const auto a = fixtures::check_layer(MaxPool2{}, fixtures::separated_tensor({2, 2, 6, 6}, 9), 10);
    EXPECT_LT(a.max_rel_error, 1e-4);
    EXPECT_EQ(a.nonzero, 2u * 2 * 3 * 3);
    const auto b = fixtures::check_layer(MaxPool2{}, fixtures::separated_tensor({1, 2, 5, 7}, 11), 12);
    EXPECT_LT(b.max_rel_error, 1e-4);
    EXPECT_EQ(b.nonzero, 2u * 2 * 3);
}

TEST(GradCheck, Dense) {
    const Dense dense = randomized(Dense(18, 4), 13);
    EXPECT_EQ(output_shape(dense, {2, 2, 3, 3}), (Shape{2, 4, 1, 1}));
    expect_passes(fixtures::check_layer(dense, random_tensor({2, 2, 3, 3}, 14), 15));
}

TEST(GradCheck, Softmax) {
    expect_passes(fixtures::check_layer(Softmax{}, random_tensor({3, 5, 1, 1}, 16, -2, 2), 17));
}

TEST(GradCheck, WholeToyModel) {
    const CnnModel model = toy_model(17);
    const Tensor4 batch = random_tensor({4, 2, 8, 8}, 18, 0.0, 1.0);
    const std::vector<std::size_t> labels{0, 1, 2, 1};
    const auto r = fixtures::check_model(model, batch, labels);
    EXPECT_EQ(r.checked, model.parameter_count());
    expect_passes(r);
}

TEST(SoftmaxCrossEntropy, FusedGradientIsPMinusOneHot) {
    Dense dense(6, 4);
    std::mt19937_64 gen(19);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (double& w : dense.weights) w = d(gen);
    for (double& b : dense.bias) b = d(gen);
    const CnnModel model({1, 2, 3}, {dense, Softmax{}});
    const Tensor4 x = random_tensor({3, 1, 2, 3}, 20);
    const std::vector<std::size_t> labels{2, 0, 3};
    Gradients grads;
    model.loss_and_gradients(x, labels, grads);
    const Tensor4 p = model.forward(x);
    for (std::size_t o = 0; o < 4; ++o) {
        double gb = 0.0;
        for (std::size_t n = 0; n < 3; ++n) gb += (p.sample(n)[o] - (labels[n] == o ? 1.0 : 0.0)) / 3.0;
        EXPECT_NEAR(grads[0].bias[o], gb, 1e-10);
        for (std::size_t i = 0; i < 6; ++i) {
            double gw = 0.0;
            for (std::size_t n = 0; n < 3; ++n) {
                gw += (p.sample(n)[o] - (labels[n] == o ? 1.0 : 0.0)) / 3.0 * x.sample(n)[i];
            }
            EXPECT_NEAR(grads[0].weights[o * 6 + i], gw, 1e-10);
        }
    }
}

TEST(Softmax, RowsAreDistributions) {
    const Tensor4 p = forward(Softmax{}, random_tensor({5, 7, 1, 1}, 21, -30, 30));
    for (std::size_t n = 0; n < 5; ++n) {
        double s = 0.0;
        for (double v : p.sample(n)) {
            EXPECT_GT(v, 0.0);
            EXPECT_LT(v, 1.0);
            s += v;
        }
        EXPECT_NEAR(s, 1.0, 1e-9);
    }
}

TEST(Model, ZeroWeightsGiveUniform) {
    CnnModel model = build_model(32, 3, 5, 1);
    for (auto block : model.parameter_blocks()) std::fill(block.begin(), block.end(), 0.0);
    const Tensor4 p = model.forward(random_tensor({2, 3, 32, 32}, 22, 0, 1));
    for (double v : p.data()) EXPECT_NEAR(v, 0.2, 1e-15);
}

TEST(MaxPool, RoutesOnlyToArgmax) {
    const Tensor4 in = fixtures::separated_tensor({1, 2, 4, 6}, 23);
    const Tensor4 out = forward(MaxPool2{}, in);
    const Tensor4 g = random_tensor(out.shape(), 24);
    ParamGrad none;
    const Tensor4 back = backward(MaxPool2{}, in, out, g, none);
    double sum_in = 0.0, sum_back = 0.0;
    for (double v : g.data()) sum_in += v;
    for (double v : back.data()) sum_back += v;
    EXPECT_NEAR(sum_in, sum_back, 1e-12);
    for (std::size_t c = 0; c < 2; ++c) {
        for (std::size_t y = 0; y < 4; ++y) {
            for (std::size_t x = 0; x < 6; ++x) {
                const bool is_max = in.at(0, c, y, x) == out.at(0, c, y / 2, x / 2);
                EXPECT_EQ(back.at(0, c, y, x), is_max ? g.at(0, c, y / 2, x / 2) : 0.0);
            }
        }
    }
}

TEST(BuildModel, FeatureDims) {
    for (auto [size, features] : {std::pair<std::size_t, std::size_t>{64, 1024}, {32, 256}}) {
        const CnnModel m = build_model(size, 3, 10, 0);
        const auto& dense = std::get<Dense>(m.layers()[m.layers().size() - 2]);
        EXPECT_EQ(dense.in_features, features);
        Shape s{1, 3, size, size};
        for (std::size_t i = 0; i + 2 < m.layers().size(); ++i) s = output_shape(m.layers()[i], s);
        EXPECT_EQ(s, (Shape{1, 64, size / 16, size / 16}));
        EXPECT_EQ(m.num_classes(), 10u);
    }
    EXPECT_THROW(build_model(48, 3, 2, 0), PreconditionError);
    EXPECT_THROW(build_model(32, 2, 2, 0), PreconditionError);
}

TEST(BuildModel, SeedDeterminism) {
    EXPECT_EQ(build_model(32, 3, 4, 99), build_model(32, 3, 4, 99));
    EXPECT_FALSE(build_model(32, 3, 4, 99) == build_model(32, 3, 4, 100));
}

TEST(Sgd, SmallStepDescends) {
    CnnModel model = toy_model(25);
    const Tensor4 batch = random_tensor({6, 2, 8, 8}, 26, -1.0, 1.0);
    const std::vector<std::size_t> labels{0, 0, 0, 1, 2, 2};
    Gradients g;
    const double before = model.loss_and_gradients(batch, labels, g);
    double norm = 0.0;
    for (const auto& pg : g) {
        for (double v : pg.weights) norm += v * v;
    }
    ASSERT_GT(norm, 1e-8);
    EXPECT_EQ(backward_and_update(model, batch, labels, 1e-4, 0.9), before);
    EXPECT_LT(model.loss_and_gradients(batch, labels, g), before);
}

TEST(Sgd, ZeroLearningRateChangesNothing) {
    CnnModel model = toy_model(27);
    const CnnModel original = model;
    const Tensor4 batch = random_tensor({3, 2, 8, 8}, 28, 0.0, 1.0);
    const std::vector<std::size_t> labels{0, 1, 2};
    SgdMomentum opt(0.0, 0.9);
    const double first = opt.step(model, batch, labels);
    const double second = opt.step(model, batch, labels);
    EXPECT_EQ(first, second);
    EXPECT_EQ(model, original);
}

TEST(Sgd, NonFiniteLossIsDivergence) {
    CnnModel model = toy_model(29);
    model.parameter_blocks().back()[0] = std::numeric_limits<double>::quiet_NaN();
    const Tensor4 batch = random_tensor({2, 2, 8, 8}, 30, 0.0, 1.0);
    const std::vector<std::size_t> labels{0, 1};
    SgdMomentum opt(0.01, 0.9);
    EXPECT_THROW(opt.step(model, batch, labels), DivergenceError);
}

TEST(Split, Counts) {
    EXPECT_EQ(split_counts(280), (SplitCounts{196, 28, 56}));
    EXPECT_EQ(split_counts(10), (SplitCounts{7, 1, 2}));
    EXPECT_EQ(split_counts(100), (SplitCounts{70, 10, 20}));
    for (std::size_t n = 1; n < 300; ++n) {
        const SplitCounts c = split_counts(n);
        EXPECT_EQ(c.train + c.val + c.test, n);
        EXPECT_GE(c.train, 7 * n / 10);
    }
    EXPECT_EQ(split_counts(3), (SplitCounts{3, 0, 0}));
    EXPECT_EQ(split_counts(9), (SplitCounts{7, 1, 1}));
}

TEST(Split, StratifiedDisjointDeterministic) {
    std::vector<LabeledImage> samples;
    for (std::size_t k = 0; k < 3; ++k) {
        for (std::size_t i = 0; i < 280; ++i) {
            samples.push_back({ImageRaster(1, 1, 1), k, std::to_string(k) + "_" + std::to_string(i)});
        }
    }
    const SplitDataset a = split_7_1_2(samples, 5);
    EXPECT_EQ(a.train.size(), 3u * 196);
    EXPECT_EQ(a.val.size(), 3u * 28);
    EXPECT_EQ(a.test.size(), 3u * 56);
    EXPECT_TRUE(a.warnings.empty());
    std::set<std::string> ids;
    for (const auto* part : {&a.train, &a.val, &a.test}) {
        for (const auto& s : *part) EXPECT_TRUE(ids.insert(s.id).second) << s.id;
    }
    EXPECT_EQ(ids.size(), samples.size());
    std::vector<std::size_t> per_class(3, 0);
    for (const auto& s : a.test) ++per_class[s.label];
    EXPECT_EQ(per_class, (std::vector<std::size_t>{56, 56, 56}));

    const SplitDataset b = split_7_1_2(samples, 5);
    const SplitDataset c = split_7_1_2(samples, 6);
    auto ids_of = [](const std::vector<LabeledImage>& v) {
        std::vector<std::string> out;
        for (const auto& s : v) out.push_back(s.id);
        return out;
    };
    EXPECT_EQ(ids_of(a.test), ids_of(b.test));
    EXPECT_NE(ids_of(a.test), ids_of(c.test));
}

TEST(Split, SmallAndEmptyClasses) {
    std::vector<LabeledImage> samples;
    for (std::size_t i = 0; i < 10; ++i) samples.push_back({ImageRaster(1, 1, 1), 0, std::to_string(i)});
    samples.push_back({ImageRaster(1, 1, 1), 1, "lonely"});
    const SplitDataset s = split_7_1_2(samples, 0);
    EXPECT_EQ(s.warnings.size(), 1u);
    samples.push_back({ImageRaster(1, 1, 1), 3, "gap"});
    EXPECT_THROW(split_7_1_2(samples, 0), DataError);
}

TEST(Metrics, PerfectAndConstantPredictors) {
    const std::vector<std::size_t> truth{0, 1, 2, 3, 0, 1, 2, 3};
    const Metrics perfect = metrics_from_predictions(truth, truth, 4);
    EXPECT_EQ(perfect.accuracy, 1.0);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(perfect.confusion[i][j], i == j ? 2u : 0u);
    }
    const std::vector<std::size_t> constant(8, 1);
    const Metrics m = metrics_from_predictions(truth, constant, 4);
    EXPECT_EQ(m.accuracy, 0.25);
    std::size_t total = 0;
    for (const auto& row : m.confusion) total = std::accumulate(row.begin(), row.end(), total);
    EXPECT_EQ(total, 8u);
    EXPECT_EQ(m.total, 8u);
}

TEST(Train, LeftRightSanity) {
    SplitDataset splits = split_7_1_2(left_right_dataset(40, 31), 32);
    CnnModel model = build_model(32, 1, 2, 33);
    TrainOptions opt;
    opt.epochs = 5;
    opt.batch_size = 8;
    opt.seed = 34;
    const TrainingReport report = train(model, splits, opt);
    ASSERT_EQ(report.epochs.size(), 5u);
    ASSERT_TRUE(report.best_val_accuracy.has_value());
    EXPECT_EQ(*report.best_val_accuracy, 1.0);
    EXPECT_EQ(evaluate(model, splits.val).accuracy, 1.0);

    CnnModel again = build_model(32, 1, 2, 33);
    const TrainingReport report2 = train(again, splits, opt);
    ASSERT_EQ(report2.epochs.size(), report.epochs.size());
    for (std::size_t i = 0; i < report.epochs.size(); ++i) {
        EXPECT_EQ(report.epochs[i].train_loss, report2.epochs[i].train_loss);
        EXPECT_EQ(report.epochs[i].val_accuracy, report2.epochs[i].val_accuracy);
    }
    EXPECT_EQ(model, again);
}

TEST(Train, ZeroEpochs) {
    SplitDataset splits = split_7_1_2(left_right_dataset(10, 35), 36);
    CnnModel model = build_model(32, 1, 2, 37);
    const CnnModel initial = model;
    TrainOptions opt;
    opt.epochs = 0;
    const TrainingReport report = train(model, splits, opt);
    EXPECT_TRUE(report.epochs.empty());
    EXPECT_EQ(report.best_epoch, 0u);
    EXPECT_FALSE(report.best_val_accuracy.has_value());
    EXPECT_EQ(model, initial);
}

TEST(Evaluate, MatchesPredict) {
    const auto data = left_right_dataset(40, 38);
    const CnnModel model = build_model(32, 1, 2, 39);
    const Metrics m = evaluate(model, data);
    const auto pred = model.predict(to_batch(data));
    std::size_t hits = 0;
    for (std::size_t i = 0; i < data.size(); ++i) hits += pred[i] == data[i].label;
    EXPECT_EQ(m.total, data.size());
    EXPECT_DOUBLE_EQ(m.accuracy, static_cast<double>(hits) / static_cast<double>(data.size()));
}

TEST(Checkpoint, RoundTripIsBitExact) {
    Checkpoint ck{build_model(32, 3, 4, 40), {"a", "b", "c", "d"}};
    const Tensor4 x = random_tensor({3, 3, 32, 32}, 41, 0, 1);
    const Checkpoint back = checkpoint_from_json(checkpoint_to_json(ck));
    EXPECT_EQ(back.model, ck.model);
    EXPECT_EQ(back.class_names, ck.class_names);
    EXPECT_EQ(back.model.forward(x), ck.model.forward(x));

    const auto path = std::filesystem::temp_directory_path() / "dfhc_ckpt_test.json";
    save_checkpoint(path, ck);
    EXPECT_EQ(load_checkpoint(path).model, ck.model);
    std::filesystem::remove(path);
}

TEST(Checkpoint, RejectsGarbage) {
    EXPECT_THROW(checkpoint_from_json("not json"), ConfigError);
    EXPECT_THROW(checkpoint_from_json(R"({"format":"other","version":1})"), ConfigError);
    EXPECT_THROW(checkpoint_from_json(R"({"format":"dfhc-cnn","version":99})"), ConfigError);
    EXPECT_THROW(load_checkpoint("/nonexistent/ckpt.json"), IoError);
}
