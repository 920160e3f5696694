#include <benchmark/benchmark.h>

#include "bench_util.hpp"
#include "dfhc/codec.hpp"
#include "dfhc/png_io.hpp"

namespace {

// state.range(0) indexes kAllMethods; range(1) is the segment length.
void BM_Encode(benchmark::State& state) {
    const dfhc::CodingMethod method = dfhc::kAllMethods[static_cast<std::size_t>(state.range(0))];
    const auto segment = bench::two_clusters(static_cast<std::size_t>(state.range(1)));
    dfhc::CodecSpec spec;
    spec.method = method;
    spec.target_size = 64;
    state.SetLabel(std::string(dfhc::method_name(method)));
    for (auto _ : state) benchmark::DoNotOptimize(dfhc::encode_segment(segment, spec));
}
BENCHMARK(BM_Encode)
    ->ArgsProduct({benchmark::CreateDenseRange(0, 8, 1), {2048}})
    ->Unit(benchmark::kMicrosecond);

void BM_EncodePng(benchmark::State& state) {
    const auto img = bench::noise_image(64, 3);
    for (auto _ : state) benchmark::DoNotOptimize(dfhc::encode_png(img));
}
BENCHMARK(BM_EncodePng);

}  // namespace
