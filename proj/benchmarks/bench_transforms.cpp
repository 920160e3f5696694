#include <benchmark/benchmark.h>

#include "bench_util.hpp"
#include "dfhc/fold.hpp"
#include "dfhc/fourier.hpp"
#include "dfhc/radon.hpp"
#include "dfhc/wavelet.hpp"

namespace {

void BM_PlanFold(benchmark::State& state) {
    std::size_t l = 10;
    for (auto _ : state) {
        benchmark::DoNotOptimize(dfhc::plan_fold(3, l, dfhc::FoldMode::RGB));
        l = l == 5000 ? 10 : l + 1;
    }
}
BENCHMARK(BM_PlanFold);

void BM_FoldUnfold(benchmark::State& state) {
    const auto side = static_cast<std::size_t>(state.range(0));
    const dfhc::FoldPlan plan = dfhc::plan_fold(2, side * side / 2, dfhc::FoldMode::RGB);
    dfhc::ImageRaster strip(plan.effective_len, 2, 3, 0.5);
    for (auto _ : state) {
        auto square = dfhc::fold_strip(strip, plan);
        benchmark::DoNotOptimize(dfhc::unfold_image(square, plan));
    }
}
BENCHMARK(BM_FoldUnfold)->Arg(32)->Arg(64)->Arg(128);

// Powers of two take the radix-2 path, the rest go through Bluestein.
void BM_Dft(benchmark::State& state) {
    const auto x = bench::noise(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(dfhc::dft(x));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Dft)->Arg(512)->Arg(4096)->Arg(1000)->Arg(4099);

void BM_Fft2Image(benchmark::State& state) {
    const auto img = bench::noise_image(static_cast<std::size_t>(state.range(0)), 3);
    for (auto _ : state) benchmark::DoNotOptimize(dfhc::fft2_magnitude_image(img));
}
BENCHMARK(BM_Fft2Image)->Arg(32)->Arg(64)->Arg(90);

void BM_DwtRoundTrip(benchmark::State& state) {
    const auto x = bench::noise(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(dfhc::dwt_reconstruct(dfhc::dwt_decompose(x, 3)));
}
BENCHMARK(BM_DwtRoundTrip)->Arg(512)->Arg(4096);

void BM_Radon(benchmark::State& state) {
    const auto side = static_cast<std::size_t>(state.range(0));
    const auto plane = bench::noise(side * side);
    for (auto _ : state) benchmark::DoNotOptimize(dfhc::radon_transform(plane, side, 180));
}
BENCHMARK(BM_Radon)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
