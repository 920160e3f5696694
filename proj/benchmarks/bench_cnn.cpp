#include <benchmark/benchmark.h>

#include <random>

#include "dfhc/cnn/model.hpp"

namespace {

dfhc::cnn::Tensor4 random_batch(std::size_t n, std::size_t side) {
    dfhc::cnn::Tensor4 t({n, 3, side, side});
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    for (double& v : t.data()) v = d(gen);
    return t;
}

void BM_Forward(benchmark::State& state) {
    const auto side = static_cast<std::size_t>(state.range(0));
    const auto model = dfhc::cnn::build_model(side, 3, 10, 1);
    const auto batch = random_batch(32, side);
    for (auto _ : state) benchmark::DoNotOptimize(model.forward(batch));
    state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_Forward)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_TrainStep(benchmark::State& state) {
    const auto side = static_cast<std::size_t>(state.range(0));
    auto model = dfhc::cnn::build_model(side, 3, 10, 1);
    const auto batch = random_batch(32, side);
    std::vector<std::size_t> labels(32);
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = i % 10;
    dfhc::cnn::SgdMomentum opt(0.001, 0.9);
    for (auto _ : state) benchmark::DoNotOptimize(opt.step(model, batch, labels));
    state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_TrainStep)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
